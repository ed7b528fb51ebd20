#pragma once

#include "anodec/nets/params.hpp"

namespace anodec::baseline {

struct PidGains {
  double kp = 2.0;
  double ki = 30.0;
  double kd = 0.0;

  friend bool operator==(const PidGains&, const PidGains&) = default;
};

/// Discrete PID at a fixed rate with output clipping. The integral is
/// accumulated with forward Euler before the output is formed; with
/// anti-windup enabled it is left untouched on steps whose raw output falls
/// outside the bounds.
struct PidState {
  double integral = 0.0;  ///< [rad s]
  double previous_error = 0.0;
  bool started = false;
  PidGains gains{};
  double dt = 0.01;
  nets::InputRange bounds{};
  bool anti_windup = true;

  friend bool operator==(const PidState&, const PidState&) = default;
};

struct PidOutput {
  double u = 0.0;      ///< clipped command [bar]
  double u_raw = 0.0;  ///< pre-saturation command [bar]
};

/// Zero integral with the canonical gains (2, 30, 0).
PidState pid_reset(PidGains gains = {}, double dt = 0.01, bool anti_windup = true,
                   nets::InputRange bounds = {});

/// Error is phi_d - phi (phi is the noisy measurement). Updates `state`.
PidOutput pid_step(PidState& state, double phi_d, double phi);

}  // namespace anodec::baseline
