#include "anodec/siggen/signals.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "anodec/odecore/errors.hpp"

namespace anodec::siggen {

SampledSignal::SampledSignal(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.samples()) {
    throw ShapeError("signal has " + std::to_string(values.size()) + " samples, grid has " +
                     std::to_string(grid.samples()));
  }
}

SampledSignal generate_sinusoidal(double duration, int frequency_hz, double dt) {
  if (frequency_hz < 1) throw ConfigError("sinusoid frequency must be a positive integer");
  const Grid grid(duration, dt);
  const double omega = 2.0 * std::numbers::pi * frequency_hz;
  const double amplitude = std::sqrt(omega) / 2.0;
  std::vector<double> v(grid.samples());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = std::sin(omega * grid.time(n)) * amplitude;
  return {grid, std::move(v)};
}

void SplineGenConfig::validate() const {
  if (!(min_gap > 0.0 && min_gap < max_gap)) throw ConfigError("spline gaps need 0 < min_gap < max_gap");
  if (!(lo < hi)) throw ConfigError("spline value bounds are empty");
  if (keep_probability < 0.0 || keep_probability > 1.0) {
    throw ConfigError("keep_probability must lie in [0, 1]");
  }
}

struct CubicSpline::Impl {
  gsl_interp_accel* accel = nullptr;
  gsl_spline* spline = nullptr;
  double t_front = 0.0;
  double t_back = 0.0;

  ~Impl() {
    if (spline) gsl_spline_free(spline);
    if (accel) gsl_interp_accel_free(accel);
  }
};

CubicSpline::CubicSpline(std::span<const double> times, std::span<const double> values)
    : impl_(std::make_unique<Impl>()) {
  if (times.size() != values.size()) throw ShapeError("spline knot times and values differ in length");
  if (times.size() < 3) throw ShapeError("cubic spline needs at least 3 knots");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ShapeError("spline knot times must be strictly increasing");
  }
  // Errors are reported through return codes; never abort the process.
  gsl_set_error_handler_off();
  impl_->accel = gsl_interp_accel_alloc();
  impl_->spline = gsl_spline_alloc(gsl_interp_cspline, times.size());
  if (gsl_spline_init(impl_->spline, times.data(), values.data(), times.size()) != GSL_SUCCESS) {
    throw Error("gsl_spline_init failed");
  }
  impl_->t_front = times.front();
  impl_->t_back = times.back();
}

CubicSpline::~CubicSpline() = default;
CubicSpline::CubicSpline(CubicSpline&&) noexcept = default;
CubicSpline& CubicSpline::operator=(CubicSpline&&) noexcept = default;

double CubicSpline::operator()(double t) const {
  const double tc = std::clamp(t, impl_->t_front, impl_->t_back);
  return gsl_spline_eval(impl_->spline, tc, impl_->accel);
}

namespace {

SplineDraw spline_from_knots(const Grid& grid, std::vector<double> ts, std::vector<double> us, double lo,
                             double hi) {
  const CubicSpline spline(ts, us);
  std::vector<double> v(grid.samples());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = std::clamp(spline(grid.time(n)), lo, hi);
  return {std::move(ts), std::move(us), SampledSignal(grid, std::move(v))};
}

SplineDraw draw_knots(const Grid& grid, const SplineGenConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> gap(cfg.min_gap, cfg.max_gap);
  std::uniform_real_distribution<double> level(cfg.lo, cfg.hi);
  std::bernoulli_distribution keep(cfg.keep_probability);
  std::vector<double> ts{0.0};
  std::vector<double> us{0.0};
  // At least three knots so the spline is well defined on very short horizons.
  while (ts.back() < grid.duration() || ts.size() < 3) {
    ts.push_back(ts.back() + gap(rng));
    const bool repeat = keep(rng);
    const double fresh = level(rng);
    us.push_back(repeat ? us.back() : fresh);
  }
  return spline_from_knots(grid, std::move(ts), std::move(us), cfg.lo, cfg.hi);
}

}  // namespace

SplineDraw draw_spline_knots(double duration, const SplineGenConfig& cfg, double dt) {
  return draw_knots(Grid(duration, dt), cfg);
}

SampledSignal draw_spline(double duration, const SplineGenConfig& cfg, double dt) {
  return draw_spline_knots(duration, cfg, dt).signal;
}

SampledSignal draw_step_reference(const Grid& grid, const nets::OutputRange& range, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(range.lo, range.hi);
  return {grid, std::vector<double>(grid.samples(), level(rng))};
}

SampledSignal draw_double_step_reference(const Grid& grid, const nets::OutputRange& range,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(range.lo, range.hi);
  std::uniform_real_distribution<double> when(0.3 * grid.duration(), 0.7 * grid.duration());
  const double first = level(rng);
  double second = level(rng);
  // Exactly one discontinuity per draw.
  while (second == first) second = level(rng);
  const auto switch_index = static_cast<std::size_t>(std::llround(when(rng) / grid.dt()));
  std::vector<double> v(grid.samples());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = n < switch_index ? first : second;
  return {grid, std::move(v)};
}

SampledSignal draw_cubic_spline_reference(const Grid& grid, const nets::OutputRange& range,
                                          std::uint64_t seed) {
  SplineGenConfig cfg;
  cfg.min_gap = 0.8;
  cfg.max_gap = 1.8;
  cfg.lo = range.lo;
  cfg.hi = range.hi;
  cfg.keep_probability = 0.0;
  cfg.seed = seed;
  return draw_knots(grid, cfg).signal;
}

}  // namespace anodec::siggen
