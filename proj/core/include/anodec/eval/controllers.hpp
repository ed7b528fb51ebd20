#pragma once

#include <memory>
#include <string>

#include "anodec/baseline/pid.hpp"
#include "anodec/nets/params.hpp"

namespace anodec::eval {

/// A feedback law driven one tick at a time. At tick n it sees only the
/// current reference and measurement, so it cannot preview the reference.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual std::string id() const = 0;
  /// Zeroes all internal state before a trial.
  virtual void reset() = 0;
  /// Returns u[n] from (phi_d[n], phi_meas[n]).
  virtual double act(double phi_d, double phi_meas) = 0;
};

/// Learned neural-ODE controller. Emits the saturated output of its current
/// latent state, then advances the latent state by one RK4 step with the
/// measurement and reference held over the tick.
class AnodecController final : public Controller {
 public:
  AnodecController(nets::ControllerParams params, double dt = 0.01, nets::InputRange range = {},
                   std::string id = "anodec");

  std::string id() const override { return id_; }
  void reset() override { latent_.setZero(); }
  double act(double phi_d, double phi_meas) override;

  const nets::ControllerLatent& latent() const noexcept { return latent_; }

 private:
  nets::ControllerParams params_;
  double dt_;
  nets::InputRange range_;
  std::string id_;
  nets::ControllerLatent latent_ = nets::ControllerLatent::Zero();
  std::size_t tick_ = 0;
};

class PidController final : public Controller {
 public:
  explicit PidController(baseline::PidState initial = baseline::pid_reset(), std::string id = "pid");

  std::string id() const override { return id_; }
  void reset() override { state_ = initial_; }
  double act(double phi_d, double phi_meas) override { return baseline::pid_step(state_, phi_d, phi_meas).u; }

 private:
  baseline::PidState initial_;
  baseline::PidState state_;
  std::string id_;
};

}  // namespace anodec::eval
