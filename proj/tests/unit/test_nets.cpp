#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "anodec/nets/checkpoint.hpp"
#include "anodec/nets/fields.hpp"
#include "gradcheck.hpp"

namespace anodec::nets {
namespace {

using testing::uniform_params;

// Scalar-loop oracles written directly from the layer definitions.
std::vector<double> oracle_model_rhs(const std::vector<double>& theta, const std::vector<double>& xi, double u) {
  const int n = 9;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double s = theta[static_cast<std::size_t>(90 + i)];
    for (int j = 0; j < n; ++j) s += theta[static_cast<std::size_t>(i * 10 + j)] * xi[static_cast<std::size_t>(j)];
    s += theta[static_cast<std::size_t>(i * 10 + 9)] * u;
    out[static_cast<std::size_t>(i)] = std::tanh(s);
  }
  return out;
}

double oracle_model_output(const std::vector<double>& theta, const std::vector<double>& xi) {
  double y = theta[108];
  for (int j = 0; j < 9; ++j) y += theta[static_cast<std::size_t>(99 + j)] * xi[static_cast<std::size_t>(j)];
  return y;
}

std::vector<double> oracle_controller_rhs(const std::vector<double>& theta, const std::vector<double>& xi, double phi,
                                          double phi_d) {
  std::vector<double> out(5);
  for (int i = 0; i < 5; ++i) {
    double s = theta[static_cast<std::size_t>(35 + i)];
    for (int j = 0; j < 5; ++j) s += theta[static_cast<std::size_t>(i * 7 + j)] * xi[static_cast<std::size_t>(j)];
    s += theta[static_cast<std::size_t>(i * 7 + 5)] * phi + theta[static_cast<std::size_t>(i * 7 + 6)] * phi_d;
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

double oracle_controller_output(const std::vector<double>& theta, const std::vector<double>& xi, double lo,
                                double hi) {
  double s = theta[45];
  for (int j = 0; j < 5; ++j) s += theta[static_cast<std::size_t>(40 + j)] * xi[static_cast<std::size_t>(j)];
  return (hi - lo) * (0.5 * std::tanh(s) + 0.5) + lo;
}

template <class V>
std::vector<double> to_std(const V& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

TEST(ParamCounts, ModelAndController) {
  EXPECT_EQ(ModelParams::kSize, 109);
  EXPECT_EQ(ControllerParams::kSize, 46);
  EXPECT_EQ(ModelParams().flat().size(), 109);
  EXPECT_EQ(ControllerParams().flat().size(), 46);
}

TEST(ParamLayout, RowMajorA1ThenB1ThenA2ThenB2) {
  ModelParams p;
  for (int i = 0; i < 109; ++i) p.flat()[i] = i;
  EXPECT_EQ(p.A1()(0, 9), 9.0);
  EXPECT_EQ(p.A1()(1, 0), 10.0);
  EXPECT_EQ(p.A1()(8, 9), 89.0);
  EXPECT_EQ(p.b1()[0], 90.0);
  EXPECT_EQ(p.A2()[0], 99.0);
  EXPECT_EQ(p.b2(), 108.0);

  ControllerParams c;
  for (int i = 0; i < 46; ++i) c.flat()[i] = i;
  EXPECT_EQ(c.A1()(1, 0), 7.0);
  EXPECT_EQ(c.b1()[4], 39.0);
  EXPECT_EQ(c.A2()[4], 44.0);
  EXPECT_EQ(c.b2(), 45.0);
}

TEST(ParamLayout, FromSpanRejectsWrongCount) {
  const std::vector<double> short_list(108, 0.0);
  EXPECT_THROW(ModelParams::from_span(short_list), ShapeError);
  const std::vector<double> ok(46, 1.5);
  EXPECT_EQ(ControllerParams::from_span(ok).b2(), 1.5);
}

TEST(ModelRhs, MatchesScalarOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = uniform_params<ModelParams>(rng, 1.0);
    ModelLatent xi;
    for (auto& v : xi) v = u(rng);
    const double input = 3.0 * u(rng);
    const auto got = model_rhs(p, xi, input);
    const auto want = oracle_model_rhs(to_std(p.flat()), to_std(xi), input);
    for (int i = 0; i < 9; ++i) EXPECT_NEAR(got[i], want[static_cast<std::size_t>(i)], 1e-12);
    EXPECT_NEAR(model_output(p, xi), oracle_model_output(to_std(p.flat()), to_std(xi)), 1e-12);
  }
}

TEST(ModelRhs, BoundedByOne) {
  std::mt19937_64 rng(3);
  const auto p = uniform_params<ModelParams>(rng, 50.0);
  const auto k = model_rhs(p, ModelLatent::Constant(100.0), 6.0);
  EXPECT_LE(k.cwiseAbs().maxCoeff(), 1.0);
}

TEST(ControllerRhs, MatchesScalarOracleAndIsLinear) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = uniform_params<ControllerParams>(rng, 1.0);
    ControllerLatent xi;
    for (auto& v : xi) v = u(rng);
    const double phi = u(rng), phi_d = u(rng);
    const auto got = controller_rhs(p, xi, phi, phi_d);
    const auto want = oracle_controller_rhs(to_std(p.flat()), to_std(xi), phi, phi_d);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(got[i], want[static_cast<std::size_t>(i)], 1e-12);
    // Affine in the state: f(2 xi) - f(xi) = f(xi) - f(0).
    const auto f0 = controller_rhs(p, ControllerLatent::Zero(), phi, phi_d);
    const auto f2 = controller_rhs(p, ControllerLatent(2.0 * xi), phi, phi_d);
    EXPECT_NEAR((f2 - got - (got - f0)).norm(), 0.0, 1e-12);
  }
}

TEST(ControllerOutput, MatchesOracleAndStaysInsideRange) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = uniform_params<ControllerParams>(rng, 1.0);
    ControllerLatent xi;
    for (auto& v : xi) v = u(rng) * 0.1;
    const double got = controller_output(p, xi);
    EXPECT_NEAR(got, oracle_controller_output(to_std(p.flat()), to_std(xi), -6.0, 6.0), 1e-12);
    EXPECT_GT(got, -6.0);
    EXPECT_LT(got, 6.0);
  }
}

TEST(ControllerOutput, MidpointAtZeroPreActivation) {
  ControllerParams p;
  EXPECT_DOUBLE_EQ(controller_output(p, ControllerLatent::Zero()), 0.0);
  EXPECT_DOUBLE_EQ(controller_output(p, ControllerLatent::Zero(), {0.0, 4.0}), 2.0);
}

TEST(ControllerOutput, ModerateSaturationLevels) {
  ControllerParams p;
  p.b2() = 2.0;
  EXPECT_NEAR(controller_output(p, ControllerLatent::Zero()), 6.0 * std::tanh(2.0), 1e-12);
  EXPECT_LT(controller_output(p, ControllerLatent::Zero()), 6.0);
}

TEST(Init, DeterministicBoundedWithZeroBiases) {
  const auto a = init_model_params(5);
  EXPECT_EQ(a, init_model_params(5));
  EXPECT_FALSE(a == init_model_params(6));
  EXPECT_LE(a.A1().cwiseAbs().maxCoeff(), 1.0 / std::sqrt(10.0));
  EXPECT_LE(a.A2().cwiseAbs().maxCoeff(), 1.0 / 3.0);
  EXPECT_EQ(a.b1(), ModelLatent::Zero());
  EXPECT_EQ(a.b2(), 0.0);

  const auto c = init_controller_params(5);
  EXPECT_EQ(c, init_controller_params(5));
  EXPECT_LE(c.A1().cwiseAbs().maxCoeff(), 1.0 / std::sqrt(7.0));
  EXPECT_LE(c.A2().cwiseAbs().maxCoeff(), 1.0 / std::sqrt(5.0));
  EXPECT_EQ(c.b2(), 0.0);
}

TEST(Fields, ModelRolloutMatchesHandLoop) {
  std::mt19937_64 rng(21);
  const auto p = uniform_params<ModelParams>(rng);
  const Grid g(0.2);
  std::vector<double> u(g.steps());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(static_cast<double>(i));
  const auto xs = rollout(ModelField(p), ModelLatent::Zero(), u, g);

  std::vector<double> x(9, 0.0);
  const auto theta = to_std(p.flat());
  const double h = g.dt();
  for (std::size_t n = 0; n < g.steps(); ++n) {
    auto axpy = [](const std::vector<double>& a, double s, const std::vector<double>& b) {
      std::vector<double> r(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
      return r;
    };
    const auto k1 = oracle_model_rhs(theta, x, u[n]);
    const auto k2 = oracle_model_rhs(theta, axpy(x, h / 2, k1), u[n]);
    const auto k3 = oracle_model_rhs(theta, axpy(x, h / 2, k2), u[n]);
    const auto k4 = oracle_model_rhs(theta, axpy(x, h, k3), u[n]);
    for (std::size_t i = 0; i < 9; ++i) x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(xs.back()[i], x[static_cast<std::size_t>(i)], 1e-13);
}

TEST(Fields, ClosedLoopEvalComposesModelAndController) {
  std::mt19937_64 rng(22);
  const auto m = uniform_params<ModelParams>(rng);
  const auto c = uniform_params<ControllerParams>(rng);
  const ClosedLoopField f(m, c);
  ClosedLoopField::State x;
  std::normal_distribution<double> n;
  for (auto& v : x) v = n(rng);
  const double phi_d = 0.4;
  const auto k = f.eval(0.0, x, phi_d);
  const ModelLatent xm = x.head<9>();
  const ControllerLatent xc = x.tail<5>();
  const double u = controller_output(c, xc);
  EXPECT_NEAR((k.head<9>() - model_rhs(m, xm, u)).norm(), 0.0, 1e-14);
  EXPECT_NEAR((k.tail<5>() - controller_rhs(c, xc, model_output(m, xm), phi_d)).norm(), 0.0, 1e-14);
}

TEST(Gradients, ModelLossMatchesFiniteDifferences) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) EXPECT_LE(testing::model_gradient_error(rng, 0.1), 1e-4);
}

TEST(Gradients, ControllerObjectiveMatchesFiniteDifferences) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 5; ++trial) EXPECT_LE(testing::controller_gradient_error(rng, 0.1), 1e-4);
}

class CheckpointTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / ("anodec_ckpt_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(CheckpointTest, RoundTripIsBitExact) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = uniform_params<ModelParams>(rng, 1e3);
    m.flat()[0] = 1.0 / 3.0;
    m.flat()[1] = -0.0;
    m.flat()[2] = 5e-324;
    save_checkpoint(dir_ / "m.json", m);
    const auto back = load_model_checkpoint(dir_ / "m.json");
    for (int i = 0; i < 109; ++i) EXPECT_EQ(std::bit_cast<std::uint64_t>(back.flat()[i]),
                                            std::bit_cast<std::uint64_t>(m.flat()[i]));
    const auto c = uniform_params<ControllerParams>(rng, 1e-3);
    save_checkpoint(dir_ / "c.json", c);
    EXPECT_EQ(load_controller_checkpoint(dir_ / "c.json"), c);
  }
}

TEST_F(CheckpointTest, WrongKindOrCountRejected) {
  const auto m_text = to_checkpoint_json(ModelParams());
  EXPECT_THROW(controller_from_checkpoint_json(m_text), ConfigError);
  EXPECT_THROW(model_from_checkpoint_json(to_checkpoint_json(ControllerParams())), ConfigError);
  EXPECT_THROW(model_from_checkpoint_json("{not json"), ConfigError);
  EXPECT_THROW(load_model_checkpoint(dir_ / "missing.json"), Error);
}

}  // namespace
}  // namespace anodec::nets
