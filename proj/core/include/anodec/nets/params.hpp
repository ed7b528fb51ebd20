#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>

#include "anodec/odecore/rk4.hpp"

namespace anodec::nets {

inline constexpr int kModelLatent = 9;
inline constexpr int kModelParamCount = kModelLatent * (kModelLatent + 1) + kModelLatent + kModelLatent + 1;
inline constexpr int kControllerLatent = 5;
inline constexpr int kControllerParamCount =
    kControllerLatent * (kControllerLatent + 2) + kControllerLatent + kControllerLatent + 1;

static_assert(kModelParamCount == 109);
static_assert(kControllerParamCount == 46);

/// Feasible control input interval [bar].
struct InputRange {
  double lo = -6.0;
  double hi = 6.0;

  friend bool operator==(const InputRange&, const InputRange&) = default;
};

/// Feasible output (joint angle) interval [rad].
struct OutputRange {
  double lo = -1.0;
  double hi = 1.0;

  friend bool operator==(const OutputRange&, const OutputRange&) = default;
};

using ModelLatent = Vec<kModelLatent>;
using ControllerLatent = Vec<kControllerLatent>;

/// Flat parameter vector with named views. Flattening order is row-major
/// A1, then b1, then A2, then b2.
template <int Latent, int Inputs>
class LayeredParams {
 public:
  static constexpr int kLatent = Latent;
  static constexpr int kInputs = Inputs;
  static constexpr int kSize = Latent * (Latent + Inputs) + Latent + Latent + 1;

  using Flat = Vec<kSize>;
  using A1Matrix = Eigen::Matrix<double, Latent, Latent + Inputs, Eigen::RowMajor>;
  using A2Row = Eigen::Matrix<double, 1, Latent>;
  using LatentVec = Vec<Latent>;

  static constexpr int kA1Offset = 0;
  static constexpr int kB1Offset = Latent * (Latent + Inputs);
  static constexpr int kA2Offset = kB1Offset + Latent;
  static constexpr int kB2Offset = kA2Offset + Latent;

  LayeredParams() : flat_(Flat::Zero()) {}
  explicit LayeredParams(const Flat& flat) : flat_(flat) {}

  /// Throws ShapeError when `values` does not hold exactly kSize scalars.
  static LayeredParams from_span(std::span<const double> values) {
    if (values.size() != static_cast<std::size_t>(kSize)) {
      throw ShapeError("expected " + std::to_string(kSize) + " parameters, got " +
                       std::to_string(values.size()));
    }
    LayeredParams p;
    for (int i = 0; i < kSize; ++i) p.flat_[i] = values[static_cast<std::size_t>(i)];
    return p;
  }

  const Flat& flat() const noexcept { return flat_; }
  Flat& flat() noexcept { return flat_; }

  Eigen::Map<const A1Matrix> A1() const { return Eigen::Map<const A1Matrix>(flat_.data() + kA1Offset); }
  Eigen::Map<A1Matrix> A1() { return Eigen::Map<A1Matrix>(flat_.data() + kA1Offset); }
  Eigen::Map<const LatentVec> b1() const { return Eigen::Map<const LatentVec>(flat_.data() + kB1Offset); }
  Eigen::Map<LatentVec> b1() { return Eigen::Map<LatentVec>(flat_.data() + kB1Offset); }
  Eigen::Map<const A2Row> A2() const { return Eigen::Map<const A2Row>(flat_.data() + kA2Offset); }
  Eigen::Map<A2Row> A2() { return Eigen::Map<A2Row>(flat_.data() + kA2Offset); }
  double b2() const { return flat_[kB2Offset]; }
  double& b2() { return flat_[kB2Offset]; }

  bool all_finite() const { return flat_.allFinite(); }

  friend bool operator==(const LayeredParams& a, const LayeredParams& b) {
    return a.flat_ == b.flat_;
  }

 private:
  Flat flat_;
};

/// Plant surrogate: 9 latent states driven by the scalar input u.
using ModelParams = LayeredParams<kModelLatent, 1>;
/// Feedback controller: 5 latent states driven by (phi, phi_d).
using ControllerParams = LayeredParams<kControllerLatent, 2>;

static_assert(ModelParams::kSize == 109);
static_assert(ControllerParams::kSize == 46);

/// tanh(A1 (xi, u) + b1)
ModelLatent model_rhs(const ModelParams& p, const ModelLatent& xi, double u);
/// A2 xi + b2
double model_output(const ModelParams& p, const ModelLatent& xi);
/// A1 (xi, phi, phi_d) + b1; linear, no activation.
ControllerLatent controller_rhs(const ControllerParams& p, const ControllerLatent& xi, double phi,
                                double phi_d);
/// Maps tanh(A2 xi + b2) affinely onto the open interval (range.lo, range.hi).
double controller_output(const ControllerParams& p, const ControllerLatent& xi,
                         const InputRange& range = {});

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) per matrix, biases zero.
ModelParams init_model_params(std::uint64_t seed);
ControllerParams init_controller_params(std::uint64_t seed);

}  // namespace anodec::nets
