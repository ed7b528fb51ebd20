#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace anodec {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment estimates and step count of an Adam optimizer.
struct AdamState {
  explicit AdamState(Eigen::Index dim, AdamConfig config = {})
      : m(Eigen::VectorXd::Zero(dim)), v(Eigen::VectorXd::Zero(dim)), config(config) {}

  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t step = 0;
  AdamConfig config;
};

/// Bias-corrected Adam update, in place. Throws ShapeError on a dimension mismatch.
void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grad,
               AdamState& state);

/// Rescales `grad` onto the L2 ball of radius `max_norm` if it lies outside.
Eigen::VectorXd clip_global_norm(const Eigen::Ref<const Eigen::VectorXd>& grad, double max_norm = 1.0);

}  // namespace anodec
