#include "anodec/plant/plant.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace anodec::plant {

bool PlantState::all_finite() const {
  return std::isfinite(phi) && std::isfinite(omega) && std::isfinite(p1) && std::isfinite(p2) &&
         std::isfinite(z) && std::isfinite(creep);
}

std::string PlantState::dump() const {
  std::ostringstream os;
  os.precision(17);
  os << "{phi=" << phi << ", omega=" << omega << ", p1=" << p1 << ", p2=" << p2 << ", z=" << z
     << ", creep=" << creep << "}";
  return os.str();
}

PlantConfig PlantConfig::setup(int which) {
  PlantConfig cfg;
  switch (which) {
    case 1:
      return cfg;
    case 2:
      cfg.gravity = true;
      cfg.trial_duration = 8.0;
      return cfg;
    default:
      throw ConfigError("unknown setup " + std::to_string(which) + " (expected 1 or 2)");
  }
}

void PlantConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(inertia, "inertia");
  positive(pulley_radius, "pulley_radius");
  positive(force_gain, "force_gain");
  positive(pressure_time_constant, "pressure_time_constant");
  positive(creep_time_constant, "creep_time_constant");
  positive(supply_pressure, "supply_pressure");
  positive(trial_duration, "trial_duration");
  positive(reset_settle_time, "reset_settle_time");
  positive(bw_n, "bw_n");
  if (damping < 0.0) throw ConfigError("damping must be non-negative");
  if (noise_std < 0.0) throw ConfigError("noise_std must be non-negative");
  if (substeps < 1) throw ConfigError("substeps must be at least 1");
  if (!(input_range.lo < input_range.hi)) throw ConfigError("input range is empty");
  if (!(output_range.lo < output_range.hi)) throw ConfigError("output range is empty");
  const double half_span = 0.5 * std::max(std::abs(input_range.lo), std::abs(input_range.hi));
  if (mean_pressure - half_span < 0.0 || mean_pressure + half_span > supply_pressure) {
    throw ConfigError("mean pressure +/- u_max/2 leaves [0, supply]");
  }
}

DesiredPressures couple_pressures(double u, double mean_pressure, const nets::InputRange& range) {
  DesiredPressures out;
  double v = u;
  if (v < range.lo || v > range.hi) {
    v = std::clamp(v, range.lo, range.hi);
    out.clipped = true;
  }
  out.p_d1 = mean_pressure + 0.5 * v;
  out.p_d2 = mean_pressure - 0.5 * v;
  return out;
}

PlantState rest_state(const PlantConfig& cfg) {
  PlantState s;
  s.p1 = cfg.mean_pressure;
  s.p2 = cfg.mean_pressure;
  return s;
}

namespace {

using Vec6 = std::array<double, 6>;

Vec6 pack(const PlantState& s) { return {s.phi, s.omega, s.p1, s.p2, s.z, s.creep}; }

PlantState unpack(const Vec6& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }

double sign(double v) { return (v > 0.0) - (v < 0.0); }

Vec6 derivative(const Vec6& x, const DesiredPressures& pd, const PlantConfig& c, double external_torque) {
  const double phi = x[0], omega = x[1], p1 = x[2], p2 = x[3], z = x[4], creep = x[5];
  const double f1 = c.force_gain * p1 * (1.0 - c.contraction_coeff * phi);
  const double f2 = c.force_gain * p2 * (1.0 + c.contraction_coeff * phi);
  const double passive = c.elastic_linear * phi + c.elastic_cubic * phi * phi * phi +
                         c.hysteresis_weight * z + c.creep_weight * (phi - creep);
  double torque = c.pulley_radius * (f1 - f2 - passive) - c.damping * omega + external_torque;
  if (c.gravity) torque -= c.load_mass * c.gravity_accel * c.load_lever * std::sin(phi);

  const double z_rate =
      omega * (c.bw_alpha - (c.bw_beta * sign(z * omega) + c.bw_gamma) * std::pow(std::abs(z), c.bw_n));
  return {omega,
          torque / c.inertia,
          (pd.p_d1 - p1) / c.pressure_time_constant,
          (pd.p_d2 - p2) / c.pressure_time_constant,
          z_rate,
          (phi - creep) / c.creep_time_constant};
}

Vec6 axpy(const Vec6& x, double a, const Vec6& k) {
  Vec6 r;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = x[i] + a * k[i];
  return r;
}

void enforce_limits(Vec6& x, const PlantConfig& c) {
  const double lo = c.output_range.lo, hi = c.output_range.hi;
  if (x[0] >= hi) {
    x[0] = hi;
    x[1] = std::min(x[1], 0.0);
  } else if (x[0] <= lo) {
    x[0] = lo;
    x[1] = std::max(x[1], 0.0);
  }
  x[2] = std::clamp(x[2], 0.0, c.supply_pressure);
  x[3] = std::clamp(x[3], 0.0, c.supply_pressure);
}

}  // namespace

PlantState plant_step(const PlantState& state, double u, double dt, const PlantConfig& cfg,
                      double external_torque) {
  const DesiredPressures pd = couple_pressures(u, cfg.mean_pressure, cfg.input_range);
  const double h = dt / cfg.substeps;
  Vec6 x = pack(state);
  for (int i = 0; i < cfg.substeps; ++i) {
    const Vec6 k1 = derivative(x, pd, cfg, external_torque);
    const Vec6 k2 = derivative(axpy(x, 0.5 * h, k1), pd, cfg, external_torque);
    const Vec6 k3 = derivative(axpy(x, 0.5 * h, k2), pd, cfg, external_torque);
    const Vec6 k4 = derivative(axpy(x, h, k3), pd, cfg, external_torque);
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    enforce_limits(x, cfg);
  }
  PlantState next = unpack(x);
  if (!next.all_finite()) throw SimulationFault(next);
  return next;
}

PlantState reset_to_saturation(const PlantConfig& cfg, double dt) {
  PlantState s = rest_state(cfg);
  const auto ticks = static_cast<std::size_t>(std::llround(cfg.reset_settle_time / dt));
  for (std::size_t n = 0; n < ticks; ++n) s = plant_step(s, cfg.input_range.hi, dt, cfg);
  return s;
}

double measure(const PlantState& state, double noise_std, std::mt19937_64& noise) {
  if (noise_std == 0.0) return state.phi;
  std::normal_distribution<double> dist(0.0, noise_std);
  return state.phi + dist(noise);
}

Plant::Plant(PlantConfig cfg, std::uint64_t noise_seed, double dt)
    : cfg_(std::move(cfg)), dt_(dt), noise_(noise_seed) {
  cfg_.validate();
  reset_state_ = reset_to_saturation(cfg_, dt_);
  state_ = reset_state_;
}

void Plant::reset() { state_ = reset_state_; }

void Plant::step(double u, double external_torque) {
  if (couple_pressures(u, cfg_.mean_pressure, cfg_.input_range).clipped) ++clipped_inputs_;
  state_ = plant_step(state_, u, dt_, cfg_, external_torque);
}

double Plant::measure() {
  return std::clamp(plant::measure(state_, cfg_.noise_std, noise_), cfg_.output_range.lo,
                    cfg_.output_range.hi);
}

}  // namespace anodec::plant
