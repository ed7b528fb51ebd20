#pragma once

// Probing-input generators and reference-signal distributions.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "anodec/nets/params.hpp"
#include "anodec/odecore/grid.hpp"

namespace anodec::siggen {

/// One value per grid sample; inputs in bar, references in rad.
struct SampledSignal {
  SampledSignal(Grid g, std::vector<double> v);

  Grid grid;
  std::vector<double> values;

  std::span<const double> span() const noexcept { return values; }

  friend bool operator==(const SampledSignal&, const SampledSignal&) = default;
};

/// sin(2 pi f t) sqrt(2 pi f) / 2 on the grid t = 0, dt, ..., T.
SampledSignal generate_sinusoidal(double duration, int frequency_hz, double dt = Grid::kDefaultStep);

struct SplineGenConfig {
  double min_gap = 0.4;           ///< minimum knot spacing [s]
  double max_gap = 1.2;           ///< maximum knot spacing [s]
  double lo = -6.0;               ///< knot value bounds
  double hi = 6.0;
  double keep_probability = 0.5;  ///< chance a knot repeats the previous value
  std::uint64_t seed = 0;

  /// Throws ConfigError unless 0 < min_gap < max_gap and lo < hi.
  void validate() const;
};

/// Natural cubic spline through strictly increasing knots.
class CubicSpline {
 public:
  CubicSpline(std::span<const double> times, std::span<const double> values);
  ~CubicSpline();
  CubicSpline(CubicSpline&&) noexcept;
  CubicSpline& operator=(CubicSpline&&) noexcept;

  double operator()(double t) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct SplineDraw {
  std::vector<double> knot_times;
  std::vector<double> knot_values;
  SampledSignal signal;
};

/// Random knots starting at (0, 0) with gaps ~ U(min_gap, max_gap) until the
/// last knot reaches T; interpolated on the grid and clipped to [lo, hi].
SplineDraw draw_spline_knots(double duration, const SplineGenConfig& cfg, double dt = Grid::kDefaultStep);
SampledSignal draw_spline(double duration, const SplineGenConfig& cfg, double dt = Grid::kDefaultStep);

/// Constant level ~ U(range).
SampledSignal draw_step_reference(const Grid& grid, const nets::OutputRange& range, std::uint64_t seed);

/// Two independent uniform levels with a grid-aligned switch in [0.3 T, 0.7 T].
SampledSignal draw_double_step_reference(const Grid& grid, const nets::OutputRange& range,
                                         std::uint64_t seed);

/// Smooth reference: spline knots with gaps U(0.8, 1.8) s, fresh uniform
/// values at every knot, clipped to the range.
SampledSignal draw_cubic_spline_reference(const Grid& grid, const nets::OutputRange& range,
                                          std::uint64_t seed);

}  // namespace anodec::siggen
