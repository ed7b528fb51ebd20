#include "anodec/nets/params.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace anodec::nets {

ModelLatent model_rhs(const ModelParams& p, const ModelLatent& xi, double u) {
  const auto A1 = p.A1();
  ModelLatent pre = A1.leftCols<kModelLatent>() * xi + A1.col(kModelLatent) * u + p.b1();
  return pre.array().tanh().matrix();
}

double model_output(const ModelParams& p, const ModelLatent& xi) { return p.A2().dot(xi) + p.b2(); }

ControllerLatent controller_rhs(const ControllerParams& p, const ControllerLatent& xi, double phi,
                                double phi_d) {
  const auto A1 = p.A1();
  return A1.leftCols<kControllerLatent>() * xi + A1.col(kControllerLatent) * phi +
         A1.col(kControllerLatent + 1) * phi_d + p.b1();
}

double controller_output(const ControllerParams& p, const ControllerLatent& xi, const InputRange& range) {
  const double u_bar = std::tanh(p.A2().dot(xi) + p.b2());
  const double u = (range.hi - range.lo) * (u_bar * 0.5 + 0.5) + range.lo;
  // tanh rounds to +-1 for large arguments; keep the result representably inside the open interval.
  return std::clamp(u, std::nextafter(range.lo, range.hi), std::nextafter(range.hi, range.lo));
}

namespace {

template <class Params>
Params init_layered(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Params p;
  const double s1 = 1.0 / std::sqrt(static_cast<double>(Params::kLatent + Params::kInputs));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(Params::kLatent));
  std::uniform_real_distribution<double> first(-s1, s1);
  std::uniform_real_distribution<double> second(-s2, s2);
  auto A1 = p.A1();
  for (Eigen::Index r = 0; r < A1.rows(); ++r) {
    for (Eigen::Index c = 0; c < A1.cols(); ++c) A1(r, c) = first(rng);
  }
  auto A2 = p.A2();
  for (Eigen::Index c = 0; c < A2.cols(); ++c) A2(0, c) = second(rng);
  return p;
}

}  // namespace

ModelParams init_model_params(std::uint64_t seed) { return init_layered<ModelParams>(seed); }

ControllerParams init_controller_params(std::uint64_t seed) {
  return init_layered<ControllerParams>(seed);
}

}  // namespace anodec::nets
