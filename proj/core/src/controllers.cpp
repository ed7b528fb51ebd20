#include "anodec/eval/controllers.hpp"

#include "anodec/odecore/rk4.hpp"

namespace anodec::eval {

AnodecController::AnodecController(nets::ControllerParams params, double dt, nets::InputRange range, std::string id)
    : params_(std::move(params)), dt_(dt), range_(range), id_(std::move(id)) {}

double AnodecController::act(double phi_d, double phi_meas) {
  const double u = nets::controller_output(params_, latent_, range_);
  auto rhs = [&](double, const nets::ControllerLatent& xi, double) {
    return nets::controller_rhs(params_, xi, phi_meas, phi_d);
  };
  latent_ = rk4_step<nets::kControllerLatent>(rhs, latent_, 0.0, dt_, phi_d, tick_++);
  return u;
}

PidController::PidController(baseline::PidState initial, std::string id)
    : initial_(initial), state_(initial), id_(std::move(id)) {}

}  // namespace anodec::eval
