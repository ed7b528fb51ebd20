#pragma once

#include <cstddef>

namespace anodec {

/// Uniform time grid t0, t0 + dt, ..., t0 + T. The duration must be an
/// integer multiple of the step; construction throws ShapeError otherwise.
class Grid {
 public:
  static constexpr double kDefaultStep = 0.01;

  explicit Grid(double duration, double dt = kDefaultStep, double t0 = 0.0);

  double t0() const noexcept { return t0_; }
  double duration() const noexcept { return duration_; }
  double dt() const noexcept { return dt_; }

  /// Number of integration steps, T / dt.
  std::size_t steps() const noexcept { return steps_; }
  /// Number of samples, T / dt + 1.
  std::size_t samples() const noexcept { return steps_ + 1; }

  double time(std::size_t n) const noexcept { return t0_ + static_cast<double>(n) * dt_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double t0_;
  double duration_;
  double dt_;
  std::size_t steps_;
};

}  // namespace anodec
