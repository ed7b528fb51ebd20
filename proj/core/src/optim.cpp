#include "anodec/odecore/optim.hpp"

#include <cmath>

#include "anodec/odecore/errors.hpp"

namespace anodec {

void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grad,
               AdamState& state) {
  if (params.size() != grad.size() || params.size() != state.m.size()) {
    throw ShapeError("adam_step: parameter, gradient and moment dimensions differ");
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double k = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(c.beta1, k);
  const double bias2 = 1.0 - std::pow(c.beta2, k);
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = state.m[i] / bias1;
    const double v_hat = state.v[i] / bias2;
    params[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

Eigen::VectorXd clip_global_norm(const Eigen::Ref<const Eigen::VectorXd>& grad, double max_norm) {
  if (!(max_norm > 0.0)) throw ConfigError("clip_global_norm: max_norm must be positive");
  const double norm = grad.norm();
  if (norm <= max_norm) return grad;
  return grad * (max_norm / norm);
}

}  // namespace anodec
