#pragma once

// Fixed-step RK4 integration of small vector fields and exact reverse-mode
// gradients through the unrolled integration (discretize, then differentiate).

#include <Eigen/Core>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "anodec/odecore/errors.hpp"
#include "anodec/odecore/grid.hpp"

namespace anodec {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

/// A time-invariant-or-not vector field dx/dt = f(t, x, u; theta) with a
/// vector-Jacobian product. `vjp` receives the stage output `k = f(t, x, u)`
/// from the forward pass and accumulates `cot^T df/dx` into `x_bar` and
/// `cot^T df/dtheta` into `param_bar`.
template <class F>
concept DifferentiableField =
    requires(const F& f, double t, const typename F::State& x, double u, typename F::State& x_bar,
             typename F::Params& param_bar) {
      { F::kStateDim } -> std::convertible_to<int>;
      { F::kParamDim } -> std::convertible_to<int>;
      { f.eval(t, x, u) } -> std::convertible_to<typename F::State>;
      f.vjp(t, x, u, x, x, x_bar, param_bar);
    };

namespace detail {

template <int N>
void require_finite(const Vec<N>& k, std::size_t step, const char* stage) {
  if (!k.allFinite()) {
    throw IntegrationError(step, std::string("non-finite value in stage ") + stage);
  }
}

inline void check_input_length(std::size_t input_size, const Grid& grid) {
  if (input_size != grid.steps() && input_size != grid.samples()) {
    throw ShapeError("input has " + std::to_string(input_size) + " samples, grid needs " +
                     std::to_string(grid.steps()) + " (one per step) or " +
                     std::to_string(grid.samples()));
  }
}

}  // namespace detail

/// One classical RK4 step with the exogenous input held constant over the step.
template <int N, class Rhs>
Vec<N> rk4_step(Rhs&& rhs, const Vec<N>& x, double t, double dt, double u_held,
                std::size_t step_index = 0) {
  const Vec<N> k1 = rhs(t, x, u_held);
  detail::require_finite<N>(k1, step_index, "k1");
  const Vec<N> k2 = rhs(t + 0.5 * dt, Vec<N>(x + 0.5 * dt * k1), u_held);
  detail::require_finite<N>(k2, step_index, "k2");
  const Vec<N> k3 = rhs(t + 0.5 * dt, Vec<N>(x + 0.5 * dt * k2), u_held);
  detail::require_finite<N>(k3, step_index, "k3");
  const Vec<N> k4 = rhs(t + dt, Vec<N>(x + dt * k3), u_held);
  detail::require_finite<N>(k4, step_index, "k4");
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Integrates `rhs` over `grid` from `x0`. Returns grid.samples() states.
template <int N, class Rhs>
std::vector<Vec<N>> rollout(Rhs&& rhs, const Vec<N>& x0, std::span<const double> input,
                            const Grid& grid) {
  detail::check_input_length(input.size(), grid);
  std::vector<Vec<N>> states;
  states.reserve(grid.samples());
  states.push_back(x0);
  for (std::size_t n = 0; n < grid.steps(); ++n) {
    states.push_back(rk4_step<N>(rhs, states.back(), grid.time(n), grid.dt(), input[n], n));
  }
  return states;
}

template <DifferentiableField F>
std::vector<typename F::State> rollout(const F& field, const typename F::State& x0,
                                       std::span<const double> input, const Grid& grid) {
  auto rhs = [&field](double t, const typename F::State& x, double u) { return field.eval(t, x, u); };
  return rollout<F::kStateDim>(rhs, x0, input, grid);
}

template <int P>
struct GradResult {
  double loss = 0.0;
  Vec<P> grad = Vec<P>::Zero();
};

/// Stage inputs and outputs of every step, kept for the reverse sweep.
template <int N>
struct Rk4Tape {
  struct Step {
    Vec<N> s[4];
    Vec<N> k[4];
  };
  std::vector<Vec<N>> states;
  std::vector<Step> steps;
};

template <DifferentiableField F>
void record_rollout(const F& field, const typename F::State& x0, std::span<const double> input,
                    const Grid& grid, Rk4Tape<F::kStateDim>& tape) {
  constexpr int N = F::kStateDim;
  detail::check_input_length(input.size(), grid);
  const double dt = grid.dt();
  tape.states.resize(grid.samples());
  tape.steps.resize(grid.steps());
  tape.states[0] = x0;
  for (std::size_t n = 0; n < grid.steps(); ++n) {
    auto& st = tape.steps[n];
    const Vec<N>& x = tape.states[n];
    const double t = grid.time(n);
    const double u = input[n];
    st.s[0] = x;
    st.k[0] = field.eval(t, st.s[0], u);
    detail::require_finite<N>(st.k[0], n, "k1");
    st.s[1] = x + 0.5 * dt * st.k[0];
    st.k[1] = field.eval(t + 0.5 * dt, st.s[1], u);
    detail::require_finite<N>(st.k[1], n, "k2");
    st.s[2] = x + 0.5 * dt * st.k[1];
    st.k[2] = field.eval(t + 0.5 * dt, st.s[2], u);
    detail::require_finite<N>(st.k[2], n, "k3");
    st.s[3] = x + dt * st.k[2];
    st.k[3] = field.eval(t + dt, st.s[3], u);
    detail::require_finite<N>(st.k[3], n, "k4");
    tape.states[n + 1] = x + (dt / 6.0) * (st.k[0] + 2.0 * st.k[1] + 2.0 * st.k[2] + st.k[3]);
  }
}

/// Reverse sweep through a recorded rollout. `state_bar[n]` is the direct
/// sensitivity of the loss to sample n; the parameter gradient is added to
/// `param_bar`. Returns the sensitivity to the initial state.
template <DifferentiableField F>
typename F::State backprop_rollout(const F& field, std::span<const double> input, const Grid& grid,
                                   const Rk4Tape<F::kStateDim>& tape,
                                   std::span<const typename F::State> state_bar,
                                   typename F::Params& param_bar) {
  using State = typename F::State;
  const double dt = grid.dt();
  const std::size_t steps = grid.steps();
  State x_bar = state_bar[steps];
  State s_bar;
  for (std::size_t i = steps; i-- > 0;) {
    const auto& st = tape.steps[i];
    const double t = grid.time(i);
    const double u = input[i];
    State k_bar[4] = {(dt / 6.0) * x_bar, (dt / 3.0) * x_bar, (dt / 3.0) * x_bar, (dt / 6.0) * x_bar};
    State prev_bar = x_bar;

    s_bar.setZero();
    field.vjp(t + dt, st.s[3], u, st.k[3], k_bar[3], s_bar, param_bar);
    prev_bar += s_bar;
    k_bar[2] += dt * s_bar;

    s_bar.setZero();
    field.vjp(t + 0.5 * dt, st.s[2], u, st.k[2], k_bar[2], s_bar, param_bar);
    prev_bar += s_bar;
    k_bar[1] += 0.5 * dt * s_bar;

    s_bar.setZero();
    field.vjp(t + 0.5 * dt, st.s[1], u, st.k[1], k_bar[1], s_bar, param_bar);
    prev_bar += s_bar;
    k_bar[0] += 0.5 * dt * s_bar;

    s_bar.setZero();
    field.vjp(t, st.s[0], u, st.k[0], k_bar[0], s_bar, param_bar);
    prev_bar += s_bar;

    x_bar = prev_bar + state_bar[i];
  }
  return x_bar;
}

template <int P>
void require_finite_gradient(const Vec<P>& grad) {
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) throw GradientError(static_cast<std::size_t>(i));
  }
}

/// Loss value and exact gradient of a trajectory functional with respect to
/// the field parameters. `loss(states, state_bar, param_bar)` returns the
/// loss, writes dL/dstate for every sample into `state_bar` (pre-zeroed) and
/// may add direct parameter dependence (e.g. an output map) to `param_bar`.
template <DifferentiableField F, class Loss>
GradResult<F::kParamDim> rollout_grad(const F& field, const typename F::State& x0,
                                      std::span<const double> input, const Grid& grid, Loss&& loss,
                                      Rk4Tape<F::kStateDim>* scratch = nullptr) {
  using State = typename F::State;
  Rk4Tape<F::kStateDim> local;
  Rk4Tape<F::kStateDim>& tape = scratch ? *scratch : local;
  record_rollout(field, x0, input, grid, tape);

  std::vector<State> state_bar(tape.states.size(), State::Zero());
  GradResult<F::kParamDim> out;
  out.loss = loss(std::span<const State>(tape.states), std::span<State>(state_bar), out.grad);
  backprop_rollout(field, input, grid, tape, std::span<const State>(state_bar), out.grad);
  require_finite_gradient<F::kParamDim>(out.grad);
  return out;
}

}  // namespace anodec
