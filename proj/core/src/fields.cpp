#include "anodec/nets/fields.hpp"

#include <cmath>

namespace anodec::nets {

namespace {

using ModelA1 = ModelParams::A1Matrix;
using ControllerA1 = ControllerParams::A1Matrix;

}  // namespace

void ModelField::vjp(double, const State& x, double u, const State& k, const State& cot, State& x_bar,
                     Params& param_bar) const {
  const State a_bar = (cot.array() * (1.0 - k.array().square())).matrix();
  Eigen::Map<ModelA1> A1_bar(param_bar.data() + ModelParams::kA1Offset);
  A1_bar.leftCols<kModelLatent>().noalias() += a_bar * x.transpose();
  A1_bar.col(kModelLatent) += a_bar * u;
  param_bar.segment<kModelLatent>(ModelParams::kB1Offset) += a_bar;
  x_bar.noalias() += params_.A1().leftCols<kModelLatent>().transpose() * a_bar;
}

ClosedLoopField::State ClosedLoopField::eval(double, const State& x, double phi_d) const {
  const auto xi_m = x.head<kModelLatent>();
  const auto xi_c = x.tail<kControllerLatent>();
  const double u = controller_output(controller_, xi_c, range_);
  const double phi_hat = model_output(model_, xi_m);
  State out;
  out.head<kModelLatent>() = model_rhs(model_, xi_m, u);
  out.tail<kControllerLatent>() = controller_rhs(controller_, xi_c, phi_hat, phi_d);
  return out;
}

void ClosedLoopField::vjp(double, const State& x, double phi_d, const State& k, const State& cot,
                          State& x_bar, Params& param_bar) const {
  const auto xi_m = x.head<kModelLatent>();
  const auto xi_c = x.tail<kControllerLatent>();
  const auto cot_m = cot.head<kModelLatent>();
  const auto cot_c = cot.tail<kControllerLatent>();

  // Model block: k_m = tanh(A1m (xi_m, u) + b1m), model parameters frozen.
  const Vec<kModelLatent> a_bar =
      (cot_m.array() * (1.0 - k.head<kModelLatent>().array().square())).matrix();
  const auto A1m = model_.A1();
  x_bar.head<kModelLatent>().noalias() += A1m.leftCols<kModelLatent>().transpose() * a_bar;
  const double u_bar = A1m.col(kModelLatent).dot(a_bar);

  // Controller latent block: linear in (xi_c, phi_hat, phi_d).
  const double phi_hat = model_output(model_, xi_m);
  const auto A1c = controller_.A1();
  Eigen::Map<ControllerA1> A1c_bar(param_bar.data() + ControllerParams::kA1Offset);
  A1c_bar.leftCols<kControllerLatent>().noalias() += cot_c * xi_c.transpose();
  A1c_bar.col(kControllerLatent) += cot_c * phi_hat;
  A1c_bar.col(kControllerLatent + 1) += cot_c * phi_d;
  param_bar.segment<kControllerLatent>(ControllerParams::kB1Offset) += cot_c;
  x_bar.tail<kControllerLatent>().noalias() += A1c.leftCols<kControllerLatent>().transpose() * cot_c;
  const double phi_hat_bar = A1c.col(kControllerLatent).dot(cot_c);
  x_bar.head<kModelLatent>() += phi_hat_bar * model_.A2().transpose();

  // Saturated controller output u = (hi - lo)(0.5 tanh(s) + 0.5) + lo.
  const double u_unit = std::tanh(controller_.A2().dot(xi_c) + controller_.b2());
  const double s_bar = u_bar * 0.5 * (range_.hi - range_.lo) * (1.0 - u_unit * u_unit);
  param_bar.segment<kControllerLatent>(ControllerParams::kA2Offset) += s_bar * xi_c;
  param_bar[ControllerParams::kB2Offset] += s_bar;
  x_bar.tail<kControllerLatent>() += s_bar * controller_.A2().transpose();
}

}  // namespace anodec::nets
