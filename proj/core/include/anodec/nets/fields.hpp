#pragma once

// Differentiable vector fields for the RK4 engine: the open-loop model and the
// closed loop formed by model and controller.

#include "anodec/nets/params.hpp"

namespace anodec::nets {

/// Open-loop model dxi/dt = tanh(A1 (xi, u) + b1), differentiated w.r.t. all
/// 109 model parameters.
class ModelField {
 public:
  static constexpr int kStateDim = kModelLatent;
  static constexpr int kParamDim = ModelParams::kSize;
  using State = Vec<kStateDim>;
  using Params = Vec<kParamDim>;

  explicit ModelField(const ModelParams& params) : params_(params) {}

  State eval(double /*t*/, const State& x, double u) const { return model_rhs(params_, x, u); }

  void vjp(double /*t*/, const State& x, double u, const State& k, const State& cot, State& x_bar,
           Params& param_bar) const;

  const ModelParams& params() const noexcept { return params_; }

 private:
  const ModelParams& params_;
};

/// Joint 14-dimensional latent system: 9 model states followed by 5 controller
/// states. The exogenous input is the reference phi_d; the controller sees the
/// model output phi_hat and drives the model through its saturated output.
/// Differentiated w.r.t. the 46 controller parameters only (model frozen).
class ClosedLoopField {
 public:
  static constexpr int kStateDim = kModelLatent + kControllerLatent;
  static constexpr int kParamDim = ControllerParams::kSize;
  using State = Vec<kStateDim>;
  using Params = Vec<kParamDim>;

  ClosedLoopField(const ModelParams& model, const ControllerParams& controller, InputRange range = {})
      : model_(model), controller_(controller), range_(range) {}

  State eval(double /*t*/, const State& x, double phi_d) const;

  void vjp(double /*t*/, const State& x, double phi_d, const State& k, const State& cot, State& x_bar,
           Params& param_bar) const;

  /// Controller output for a joint state.
  double control(const State& x) const {
    return controller_output(controller_, x.tail<kControllerLatent>(), range_);
  }
  /// Model output for a joint state.
  double output(const State& x) const { return model_output(model_, x.head<kModelLatent>()); }

  const ModelParams& model() const noexcept { return model_; }
  const ControllerParams& controller() const noexcept { return controller_; }

 private:
  const ModelParams& model_;
  const ControllerParams& controller_;
  InputRange range_;
};

}  // namespace anodec::nets
