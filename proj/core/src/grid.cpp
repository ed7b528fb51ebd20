#include "anodec/odecore/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anodec/odecore/errors.hpp"

namespace anodec {

Grid::Grid(double duration, double dt, double t0) : t0_(t0), duration_(duration), dt_(dt), steps_(0) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ShapeError("grid step must be positive and finite");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ShapeError("grid duration must be positive and finite");
  }
  const double ratio = duration / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ShapeError("duration " + std::to_string(duration) + " is not an integer multiple of dt " +
                     std::to_string(dt));
  }
  steps_ = static_cast<std::size_t>(rounded);
}

}  // namespace anodec
