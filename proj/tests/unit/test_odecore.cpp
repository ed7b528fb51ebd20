#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "anodec/odecore/errors.hpp"
#include "anodec/odecore/grid.hpp"
#include "anodec/odecore/optim.hpp"
#include "anodec/odecore/rk4.hpp"

namespace anodec {
namespace {

using V1 = Vec<1>;
using V2 = Vec<2>;

auto decay = [](double, const V1& x, double) -> V1 { return -x; };

// Scalar field dx/dt = theta with its exact VJP.
struct ConstantField {
  static constexpr int kStateDim = 1;
  static constexpr int kParamDim = 1;
  using State = V1;
  using Params = V1;
  double theta = 0.0;
  State eval(double, const State&, double) const { return State::Constant(theta); }
  void vjp(double, const State&, double, const State&, const State& cot, State&, Params& param_bar) const {
    param_bar[0] += cot[0];
  }
};

// dx/dt = a * x + b * u with parameters (a, b).
struct LinearField {
  static constexpr int kStateDim = 1;
  static constexpr int kParamDim = 2;
  using State = V1;
  using Params = V2;
  double a = -1.0;
  double b = 1.0;
  State eval(double, const State& x, double u) const { return State::Constant(a * x[0] + b * u); }
  void vjp(double, const State& x, double u, const State&, const State& cot, State& x_bar, Params& param_bar) const {
    x_bar[0] += a * cot[0];
    param_bar[0] += x[0] * cot[0];
    param_bar[1] += u * cot[0];
  }
};

TEST(Grid, SampleCountAndTimes) {
  const Grid g(5.0);
  EXPECT_EQ(g.steps(), 500u);
  EXPECT_EQ(g.samples(), 501u);
  EXPECT_DOUBLE_EQ(g.time(0), 0.0);
  EXPECT_NEAR(g.time(500), 5.0, 1e-12);
  EXPECT_EQ(Grid(8.0).samples(), 801u);
}

TEST(Grid, RejectsNonIntegerStepCount) {
  EXPECT_THROW(Grid(0.015), ShapeError);
  EXPECT_THROW(Grid(1.0, 0.0), Error);
  EXPECT_THROW(Grid(-1.0), Error);
}

TEST(Rk4Step, ZeroFieldIsFixedPoint) {
  auto zero = [](double, const V2&, double) -> V2 { return V2::Zero(); };
  const V2 x(1.0, 2.0);
  EXPECT_EQ(rk4_step<2>(zero, x, 0.0, 0.01, 0.0), x);
}

TEST(Rk4Step, ConstantFieldIsExact) {
  auto one = [](double, const V1&, double) -> V1 { return V1::Constant(1.0); };
  EXPECT_NEAR(rk4_step<1>(one, V1::Zero(), 0.0, 0.1, 0.0)[0], 0.1, 1e-15);
}

TEST(Rk4Step, DecayMatchesStageExpansion) {
  // Independent oracle: k1 = -1, k2 = -(1 - 0.05), k3 = -(1 + 0.05 k2), k4 = -(1 + 0.1 k3).
  const double h = 0.1;
  const double k1 = -1.0;
  const double k2 = -(1.0 + 0.5 * h * k1);
  const double k3 = -(1.0 + 0.5 * h * k2);
  const double k4 = -(1.0 + h * k3);
  const double oracle = 1.0 + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  EXPECT_DOUBLE_EQ(k2, -0.95);
  EXPECT_DOUBLE_EQ(k3, -0.9525);
  EXPECT_DOUBLE_EQ(k4, -0.90475);
  const double x = rk4_step<1>(decay, V1::Constant(1.0), 0.0, h, 0.0)[0];
  EXPECT_NEAR(x, oracle, 1e-15);
  EXPECT_NEAR(x, 0.9048375, 1e-7);
}

TEST(Rk4Step, InputIsHeldOverAllStages) {
  auto follow_u = [](double, const V1&, double u) -> V1 { return V1::Constant(u); };
  EXPECT_NEAR(rk4_step<1>(follow_u, V1::Zero(), 0.0, 0.01, 3.0)[0], 0.03, 1e-15);
}

TEST(Rk4Step, NonFiniteStageReportsStepIndex) {
  auto blowup = [](double, const V1& x, double) -> V1 { return V1::Constant(1.0 / (x[0] - 1.0)); };
  try {
    rk4_step<1>(blowup, V1::Constant(1.0), 0.0, 0.01, 0.0, 42);
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_EQ(e.step(), 42u);
  }
}

TEST(Rollout, ZeroFieldGivesIdenticalStates) {
  auto zero = [](double, const V1&, double) -> V1 { return V1::Zero(); };
  const Grid g(5.0);
  const std::vector<double> u(g.steps(), 0.0);
  const auto xs = rollout<1>(zero, V1::Zero(), u, g);
  ASSERT_EQ(xs.size(), 501u);
  for (const auto& x : xs) EXPECT_EQ(x[0], 0.0);
}

TEST(Rollout, TwoDecaySteps) {
  const Grid g(0.02);
  const std::vector<double> u(g.steps(), 0.0);
  const auto xs = rollout<1>(decay, V1::Constant(1.0), u, g);
  ASSERT_EQ(xs.size(), 3u);
  const double one_step = rk4_step<1>(decay, V1::Constant(1.0), 0.0, 0.01, 0.0)[0];
  EXPECT_EQ(xs[0][0], 1.0);
  EXPECT_NEAR(xs[1][0], 0.99004983, 1e-8);
  EXPECT_NEAR(xs[2][0], 0.98019867, 1e-8);
  EXPECT_NEAR(xs[2][0], one_step * one_step, 1e-15);  // linear field: RK4 is a fixed multiplier
}

TEST(Rollout, InputLengthMismatchThrows) {
  const Grid g(0.1);
  const std::vector<double> wrong(7, 0.0);
  EXPECT_THROW(rollout<1>(decay, V1::Zero(), wrong, g), ShapeError);
}

TEST(Rollout, AcceptsPerStepAndPerSampleInputs) {
  const Grid g(0.1);
  auto follow_u = [](double, const V1&, double u) -> V1 { return V1::Constant(u); };
  std::vector<double> per_step(g.steps(), 1.0);
  std::vector<double> per_sample(g.samples(), 1.0);
  per_sample.back() = 1e9;  // the last sample is never applied
  EXPECT_EQ(rollout<1>(follow_u, V1::Zero(), per_step, g).back(),
            rollout<1>(follow_u, V1::Zero(), per_sample, g).back());
}

TEST(Rollout, IsDeterministic) {
  const Grid g(1.0);
  std::vector<double> u(g.steps());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(0.1 * static_cast<double>(i));
  const LinearField f{-2.0, 0.7};
  const auto a = rollout(f, V1::Constant(0.3), u, g);
  const auto b = rollout(f, V1::Constant(0.3), u, g);
  EXPECT_EQ(a, b);
}

TEST(Rk4Order, ErrorRatioNearSixteen) {
  auto global_error = [](double dt) {
    const Grid g(1.0, dt);
    const std::vector<double> u(g.steps(), 0.0);
    return std::abs(rollout<1>(decay, V1::Constant(1.0), u, g).back()[0] - std::exp(-1.0));
  };
  const double ratio = global_error(0.1) / global_error(0.05);
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(RolloutGrad, LossIndependentOfParamsGivesZeroGradient) {
  const Grid g(0.1);
  const std::vector<double> u(g.steps(), 0.5);
  auto loss = [](std::span<const V1> xs, std::span<V1>, V2&) { return static_cast<double>(xs.size()); };
  const auto r = rollout_grad(LinearField{}, V1::Constant(1.0), u, g, loss);
  EXPECT_EQ(r.grad, V2::Zero());
}

TEST(RolloutGrad, ConstantFieldFinalStateGradientIsDuration) {
  const Grid g(0.37);
  const std::vector<double> u(g.steps(), 0.0);
  auto final_state = [](std::span<const V1> xs, std::span<V1> bar, V1&) {
    bar.back()[0] = 1.0;
    return xs.back()[0];
  };
  const auto r = rollout_grad(ConstantField{0.8}, V1::Zero(), u, g, final_state);
  EXPECT_NEAR(r.loss, 0.8 * 0.37, 1e-14);
  EXPECT_NEAR(r.grad[0], 0.37, 1e-14);
}

TEST(RolloutGrad, LinearFieldMatchesFiniteDifferences) {
  const Grid g(0.1);
  std::vector<double> u(g.steps());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::cos(static_cast<double>(i));
  auto loss_of = [&](const LinearField& f) {
    auto sq = [](std::span<const V1> xs, std::span<V1> bar, V2&) {
      double s = 0.0;
      for (std::size_t n = 0; n < xs.size(); ++n) {
        s += xs[n][0] * xs[n][0];
        bar[n][0] = 2.0 * xs[n][0];
      }
      return s;
    };
    return rollout_grad(f, V1::Constant(0.4), u, g, sq);
  };
  const LinearField f{-1.3, 0.6};
  const auto r = loss_of(f);
  const double h = 1e-6;
  const double da = (loss_of({f.a + h, f.b}).loss - loss_of({f.a - h, f.b}).loss) / (2 * h);
  const double db = (loss_of({f.a, f.b + h}).loss - loss_of({f.a, f.b - h}).loss) / (2 * h);
  EXPECT_NEAR(r.grad[0], da, 1e-7 * std::max(1.0, std::abs(da)));
  EXPECT_NEAR(r.grad[1], db, 1e-7 * std::max(1.0, std::abs(db)));
}

TEST(RolloutGrad, NonFiniteGradientReportsIndex) {
  const Grid g(0.02);
  const std::vector<double> u(g.steps(), 0.0);
  auto poison = [](std::span<const V1>, std::span<V1>, V2& pbar) {
    pbar[1] = std::numeric_limits<double>::quiet_NaN();
    return 0.0;
  };
  try {
    rollout_grad(LinearField{}, V1::Zero(), u, g, poison);
    FAIL() << "expected GradientError";
  } catch (const GradientError& e) {
    EXPECT_EQ(e.parameter_index(), 1u);
  }
}

TEST(ClipGlobalNorm, BelowAndAtThresholdUnchanged) {
  Eigen::VectorXd g(3);
  g << 0.3, 0.4, 0.0;  // norm 0.5
  EXPECT_EQ(clip_global_norm(g), g);
  g << 0.6, 0.8, 0.0;  // norm exactly 1
  EXPECT_EQ(clip_global_norm(g), g);
}

TEST(ClipGlobalNorm, ScalesOntoBall) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
  g[0] = 2.0;
  const auto c = clip_global_norm(g, 1.0);
  EXPECT_DOUBLE_EQ(c[0], 1.0);
  EXPECT_EQ(c.tail(3), Eigen::VectorXd::Zero(3));
}

TEST(ClipGlobalNorm, PropertyNormBoundedAndDirectionKept) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 3.0);
  std::uniform_real_distribution<double> m(0.1, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::VectorXd g(109);
    for (auto& v : g) v = n(rng);
    const double max_norm = m(rng);
    const auto c = clip_global_norm(g, max_norm);
    EXPECT_LE(c.norm(), max_norm * (1 + 1e-12));
    EXPECT_NEAR(c.normalized().dot(g.normalized()), 1.0, 1e-12);
  }
}

TEST(ClipGlobalNorm, RejectsNonPositiveMaxNorm) {
  EXPECT_THROW(clip_global_norm(Eigen::VectorXd::Ones(2), 0.0), ConfigError);
}

TEST(Adam, ZeroGradientLeavesParamsUnchanged) {
  Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(5, -1, 1);
  const Eigen::VectorXd before = p;
  AdamState s(5);
  adam_step(p, Eigen::VectorXd::Zero(5), s);
  EXPECT_EQ(p, before);
  EXPECT_EQ(s.step, 1);
}

TEST(Adam, FirstStepMovesByLearningRateAgainstSign) {
  // Bias-corrected m_hat = g and v_hat = g^2, so the update is -lr * g / (|g| + eps).
  for (double g : {1e-3, 0.5, -7.0}) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(1);
    AdamState s(1);
    adam_step(p, Eigen::VectorXd::Constant(1, g), s);
    EXPECT_NEAR(p[0], -1e-3 * g / (std::abs(g) + 1e-8), 1e-15);
  }
}

TEST(Adam, QuadraticDecreasesMonotonically) {
  Eigen::VectorXd theta = Eigen::VectorXd::Ones(1);
  AdamState s(1);
  double prev = std::abs(theta[0]);
  for (int k = 0; k < 2; ++k) {
    adam_step(theta, theta, s);  // gradient of theta^2 / 2
    EXPECT_LT(std::abs(theta[0]), prev);
    prev = std::abs(theta[0]);
  }
}

TEST(Adam, MatchesHandIteration) {
  const double lr = 1e-3, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double m = 0, v = 0, theta = 2.0;
  Eigen::VectorXd p = Eigen::VectorXd::Constant(1, 2.0);
  AdamState s(1);
  for (int k = 1; k <= 25; ++k) {
    const double g = std::sin(theta) + theta;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    theta -= lr * (m / (1 - std::pow(b1, k))) / (std::sqrt(v / (1 - std::pow(b2, k))) + eps);
    adam_step(p, Eigen::VectorXd::Constant(1, std::sin(p[0]) + p[0]), s);
    EXPECT_NEAR(p[0], theta, 1e-14);
  }
  EXPECT_GE(s.v.minCoeff(), 0.0);
}

TEST(Adam, DimensionMismatchThrows) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
  AdamState s(3);
  EXPECT_THROW(adam_step(p, Eigen::VectorXd::Zero(2), s), ShapeError);
}

}  // namespace
}  // namespace anodec
