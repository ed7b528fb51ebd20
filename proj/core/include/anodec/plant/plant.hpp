#pragma once

// Synthetic antagonistic pneumatic-muscle arm with one rotational degree of
// freedom: first-order pressure lag, Bouc-Wen hysteresis, a Maxwell creep
// element, a hard stop at the joint limits and optional gravity loading.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

#include "anodec/nets/params.hpp"
#include "anodec/odecore/errors.hpp"

namespace anodec::plant {

struct PlantState {
  double phi = 0.0;    ///< joint angle [rad]
  double omega = 0.0;  ///< angular velocity [rad/s]
  double p1 = 0.0;     ///< bellows pressure, muscle 1 [bar]
  double p2 = 0.0;     ///< bellows pressure, muscle 2 [bar]
  double z = 0.0;      ///< Bouc-Wen hysteresis state [rad]
  double creep = 0.0;  ///< rest angle of the Maxwell creep element [rad]

  bool all_finite() const;
  std::string dump() const;

  friend bool operator==(const PlantState&, const PlantState&) = default;
};

/// Canonical coefficients come from the calibration recorded in
/// docs/plant_calibration.md; see `PlantConfig::setup`.
struct PlantConfig {
  // Rigid body.
  double inertia = 0.012;         ///< J [kg m^2]
  double damping = 0.4;           ///< d [N m s/rad]
  double pulley_radius = 0.02;    ///< r [m]
  // Muscle force map F_i = force_gain * p_i * (1 -/+ contraction_coeff * phi).
  double force_gain = 50.0;       ///< [N/bar]
  double contraction_coeff = 0.375;  ///< [1/rad]
  double elastic_linear = 25.0;   ///< passive belt/sleeve stiffness [N/rad]
  double elastic_cubic = 25.0;    ///< [N/rad^3]
  // Bouc-Wen hysteresis dz/dt = omega (alpha - (beta sgn(z omega) + gamma) |z|^n).
  double bw_alpha = 1.0;
  double bw_beta = 3.0;           ///< [1/rad^n]
  double bw_gamma = 2.0;          ///< [1/rad^n]
  double bw_n = 1.0;
  double hysteresis_weight = 90.0;  ///< [N/rad]
  // Maxwell creep element: force creep_weight * (phi - creep), d creep/dt = (phi - creep) / tau.
  double creep_weight = 30.0;     ///< [N/rad]
  double creep_time_constant = 4.8;  ///< [s]
  // Pneumatics.
  double pressure_time_constant = 0.04;  ///< tau_p [s]
  double mean_pressure = 4.0;     ///< p_m [bar]
  double supply_pressure = 8.0;   ///< [bar]
  // Setup-2 gravity load.
  bool gravity = false;
  double load_mass = 0.6;         ///< [kg]
  double load_lever = 0.25;       ///< [m]
  double gravity_accel = 9.81;    ///< [m/s^2]
  // Sensing, limits and protocol.
  double noise_std = 0.002;       ///< [rad]
  double trial_duration = 5.0;    ///< T [s]
  double reset_settle_time = 3.0; ///< saturation hold before each trial [s]
  int substeps = 4;               ///< internal RK4 sub-steps per control step
  nets::InputRange input_range{};
  nets::OutputRange output_range{};

  /// Canonical configuration for setup 1 (horizontal, 5 s trials) or
  /// setup 2 (gravity-loaded, 8 s trials). Throws ConfigError otherwise.
  static PlantConfig setup(int which);

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Raised when the simulated state becomes non-finite.
class SimulationFault : public Error {
 public:
  explicit SimulationFault(const PlantState& state)
      : Error("plant simulation fault, state: " + state.dump()), state_(state) {}
  const PlantState& state() const noexcept { return state_; }

 private:
  PlantState state_;
};

struct DesiredPressures {
  double p_d1 = 0.0;
  double p_d2 = 0.0;
  bool clipped = false;  ///< the input was outside the feasible range
};

/// Mean-pressure coupling p_d1 = p_m + u/2, p_d2 = p_m - u/2, with u clipped
/// to the feasible range first.
DesiredPressures couple_pressures(double u, double mean_pressure, const nets::InputRange& range = {});

/// Symmetric rest state: zero angle and both bellows at the mean pressure.
PlantState rest_state(const PlantConfig& cfg);

/// Advances the plant by one control interval `dt` with the input held.
/// `external_torque` [N m] is added to the joint torque balance.
PlantState plant_step(const PlantState& state, double u, double dt, const PlantConfig& cfg,
                      double external_torque = 0.0);

/// Holds u = u_max for the configured settle time starting from rest.
PlantState reset_to_saturation(const PlantConfig& cfg, double dt = 0.01);

/// phi plus N(0, noise_std) drawn from `noise`.
double measure(const PlantState& state, double noise_std, std::mt19937_64& noise);

/// Stateful stepper exposing the plant through its input-output interface.
class Plant {
 public:
  explicit Plant(PlantConfig cfg, std::uint64_t noise_seed = 0, double dt = 0.01);

  /// Returns to the trial-invariant saturation state.
  void reset();
  /// Applies `u` over one control interval.
  void step(double u, double external_torque = 0.0);
  /// Noisy angle sample of the current state, saturated to the sensor
  /// (output) range.
  double measure();

  double dt() const noexcept { return dt_; }
  const PlantConfig& config() const noexcept { return cfg_; }
  std::size_t clipped_inputs() const noexcept { return clipped_inputs_; }

  /// Noiseless angle and full state. Used for scoring and disturbance
  /// injection by the evaluation harness, never by learning code.
  double true_angle() const noexcept { return state_.phi; }
  const PlantState& state() const noexcept { return state_; }
  void set_state(const PlantState& s) { state_ = s; }

 private:
  PlantConfig cfg_;
  double dt_;
  PlantState state_;
  PlantState reset_state_;
  std::mt19937_64 noise_;
  std::size_t clipped_inputs_ = 0;
};

}  // namespace anodec::plant
