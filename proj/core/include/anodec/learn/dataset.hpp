#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "anodec/odecore/errors.hpp"
#include "anodec/plant/plant.hpp"
#include "anodec/siggen/signals.hpp"

namespace anodec::learn {

/// One probing trial: the applied input [bar] and the measured angle [rad].
struct Trial {
  siggen::SampledSignal input;
  siggen::SampledSignal output;
};

/// Six trials on a common grid; the first five train, the sixth validates.
struct Dataset {
  static constexpr std::size_t kTrials = 6;
  static constexpr std::size_t kTrain = 5;
  static constexpr std::size_t kValidationIndex = 5;

  std::vector<Trial> trials;

  std::span<const Trial> train() const { return std::span<const Trial>(trials).first(kTrain); }
  const Trial& validation() const { return trials.at(kValidationIndex); }
  const Grid& grid() const { return trials.front().input.grid; }
  /// Total simulated interaction time [s].
  double interaction_time() const;

  /// Throws ShapeError/ConfigError when the trial count, grids or ranges are off.
  void validate(const nets::InputRange& inputs = {}, const nets::OutputRange& outputs = {}) const;
};

/// Description of one probing input.
struct InputSpec {
  enum class Kind { kSinusoid, kSpline };
  Kind kind = Kind::kSinusoid;
  int frequency_hz = 1;
  siggen::SplineGenConfig spline{};
};

struct GeneratorPlan {
  std::vector<InputSpec> inputs;

  /// Two sinusoids (1 Hz, 2 Hz) and three splines for training, one more
  /// spline for validation. Spline seeds derive from `seed`.
  static GeneratorPlan canonical(std::uint64_t seed);

  std::vector<siggen::SampledSignal> realize(double duration, double dt = Grid::kDefaultStep) const;
};

/// Raised when the plant faults mid-collection; carries the trials recorded
/// before the fault.
class CollectionError : public Error {
 public:
  CollectionError(std::vector<Trial> partial, const std::string& cause)
      : Error("data collection aborted after " + std::to_string(partial.size()) + " complete trials: " + cause),
        partial_(std::move(partial)) {}
  const std::vector<Trial>& partial() const noexcept { return partial_; }

 private:
  std::vector<Trial> partial_;
};

/// Resets the plant to saturation before each input, applies it sample by
/// sample and records the noisy angle at every grid point.
Dataset collect_dataset(plant::Plant& plant, const GeneratorPlan& plan, double duration);

/// dt * sum_{n < N} |target[n] - predicted[n]|: left Riemann sum of the
/// absolute error over [0, T]. Throws ShapeError on a grid mismatch.
double trajectory_loss(const siggen::SampledSignal& target, const siggen::SampledSignal& predicted);
double trajectory_loss(std::span<const double> target, std::span<const double> predicted, const Grid& grid);

/// Root mean square over all samples.
double rmse(std::span<const double> a, std::span<const double> b);

/// One CSV per trial (t, u, phi_meas) plus nothing else; `trial_<i>.csv`.
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace anodec::learn
