#include "anodec/baseline/pid.hpp"

#include <algorithm>

#include "anodec/odecore/errors.hpp"

namespace anodec::baseline {

PidState pid_reset(PidGains gains, double dt, bool anti_windup, nets::InputRange bounds) {
  if (!(dt > 0.0)) throw ConfigError("pid dt must be positive");
  PidState s;
  s.gains = gains;
  s.dt = dt;
  s.anti_windup = anti_windup;
  s.bounds = bounds;
  return s;
}

PidOutput pid_step(PidState& state, double phi_d, double phi) {
  const double e = phi_d - phi;
  const double derivative = state.started ? (e - state.previous_error) / state.dt : 0.0;
  const double candidate = state.integral + e * state.dt;
  const double u_raw = state.gains.kp * e + state.gains.ki * candidate + state.gains.kd * derivative;
  const bool saturated = u_raw < state.bounds.lo || u_raw > state.bounds.hi;
  if (!(state.anti_windup && saturated)) state.integral = candidate;
  state.previous_error = e;
  state.started = true;
  return {std::clamp(u_raw, state.bounds.lo, state.bounds.hi), u_raw};
}

}  // namespace anodec::baseline
