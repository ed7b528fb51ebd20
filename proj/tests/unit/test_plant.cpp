#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "anodec/plant/plant.hpp"
#include "plant_probes.hpp"

namespace anodec::plant {
namespace {

PlantConfig quiet(int setup = 1) {
  auto c = PlantConfig::setup(setup);
  c.noise_std = 0.0;
  return c;
}

TEST(CouplePressures, MeanPressureExamples) {
  auto d = couple_pressures(0.0, 4.0);
  EXPECT_DOUBLE_EQ(d.p_d1, 4.0);
  EXPECT_DOUBLE_EQ(d.p_d2, 4.0);
  d = couple_pressures(6.0, 4.0);
  EXPECT_DOUBLE_EQ(d.p_d1, 7.0);
  EXPECT_DOUBLE_EQ(d.p_d2, 1.0);
  EXPECT_FALSE(d.clipped);
  d = couple_pressures(-6.0, 4.0);
  EXPECT_DOUBLE_EQ(d.p_d1, 1.0);
  EXPECT_DOUBLE_EQ(d.p_d2, 7.0);
}

TEST(CouplePressures, OutOfRangeIsClippedAndCounted) {
  const auto d = couple_pressures(9.0, 4.0);
  EXPECT_TRUE(d.clipped);
  EXPECT_DOUBLE_EQ(d.p_d1, 7.0);
  Plant p(quiet());
  p.step(9.0);
  p.step(-7.0);
  p.step(5.0);
  EXPECT_EQ(p.clipped_inputs(), 2u);
}

TEST(PlantConfig, SetupsAndValidation) {
  const auto s1 = PlantConfig::setup(1);
  const auto s2 = PlantConfig::setup(2);
  EXPECT_FALSE(s1.gravity);
  EXPECT_TRUE(s2.gravity);
  EXPECT_DOUBLE_EQ(s1.trial_duration, 5.0);
  EXPECT_DOUBLE_EQ(s2.trial_duration, 8.0);
  EXPECT_DOUBLE_EQ(s2.load_mass, 0.6);
  EXPECT_DOUBLE_EQ(s2.load_lever, 0.25);
  EXPECT_DOUBLE_EQ(s1.supply_pressure, 8.0);
  EXPECT_THROW(PlantConfig::setup(3), ConfigError);
  auto bad = s1;
  bad.pressure_time_constant = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = s1;
  bad.mean_pressure = 6.0;  // p_m + u_max / 2 exceeds the supply
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(PlantStep, ZeroInputFromRestStaysAtEquilibrium) {
  const auto c = quiet();
  auto s = rest_state(c);
  for (int n = 0; n < 500; ++n) {
    s = plant_step(s, 0.0, 0.01, c);
    ASSERT_LE(std::abs(s.phi), 1e-6);
  }
}

TEST(PlantStep, FullInputDrivesToUpperStop) {
  for (int setup : {1, 2}) {
    const auto c = quiet(setup);
    auto s = rest_state(c);
    std::vector<double> phi;
    for (int n = 0; n < 500; ++n) {
      s = plant_step(s, 6.0, 0.01, c);
      phi.push_back(s.phi);
    }
    EXPECT_DOUBLE_EQ(phi.back(), 1.0) << "setup " << setup;
    // Monotone after the first second.
    for (std::size_t n = 101; n < phi.size(); ++n) EXPECT_GE(phi[n], phi[n - 1] - 1e-12);
  }
}

TEST(PlantStep, HardStopAndPressureBoundsUnderRandomInputs) {
  const auto c = quiet();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  auto s = rest_state(c);
  for (int n = 0; n < 5000; ++n) {
    s = plant_step(s, (n / 20) % 2 ? u(rng) : 6.0 * ((n / 40) % 2 ? 1 : -1), 0.01, c);
    ASSERT_LE(std::abs(s.phi), 1.0);
    ASSERT_GE(s.p1, 0.0);
    ASSERT_LE(s.p1, c.supply_pressure);
    ASSERT_GE(s.p2, 0.0);
    ASSERT_LE(s.p2, c.supply_pressure);
    ASSERT_TRUE(s.all_finite());
  }
}

TEST(PlantStep, HardStopZeroesOutwardVelocity) {
  const auto c = quiet();
  auto s = rest_state(c);
  for (int n = 0; n < 100; ++n) s = plant_step(s, 6.0, 0.01, c);
  EXPECT_DOUBLE_EQ(s.phi, 1.0);
  EXPECT_LE(s.omega, 0.0);
}

TEST(PlantStep, PressureLagSettlesWithinFiveTimeConstants) {
  const auto c = quiet();
  auto s = rest_state(c);
  const double dt = c.pressure_time_constant / 4.0;
  const auto target = couple_pressures(4.0, c.mean_pressure);
  const double step = std::abs(target.p_d1 - s.p1);
  for (int n = 0; n < 20; ++n) s = plant_step(s, 4.0, dt, c);
  EXPECT_LT(std::abs(s.p1 - target.p_d1), 0.05 * step);
  EXPECT_LT(std::abs(s.p2 - target.p_d2), 0.05 * step);
}

TEST(PlantStep, NonFiniteInputRaisesFaultWithState) {
  const auto c = quiet();
  try {
    plant_step(rest_state(c), std::numeric_limits<double>::quiet_NaN(), 0.01, c);
    FAIL() << "expected SimulationFault";
  } catch (const SimulationFault& e) {
    EXPECT_NE(std::string(e.what()).find("phi"), std::string::npos);
  }
}

TEST(Reset, NearUpperLimitAndInvariant) {
  for (int setup : {1, 2}) {
    const auto c = quiet(setup);
    const auto first = reset_to_saturation(c);
    EXPECT_NEAR(first.phi, 1.0, 0.05);
    for (int k = 0; k < 10; ++k) EXPECT_EQ(reset_to_saturation(c), first);
  }
}

TEST(Reset, PlantResetIgnoresHistory) {
  Plant p(quiet());
  const auto initial = p.state();
  for (int n = 0; n < 300; ++n) p.step(std::sin(0.05 * n) * 6.0);
  p.reset();
  EXPECT_EQ(p.state(), initial);
}

TEST(Creep, ZeroInputDriftAfterReset) {
  EXPECT_GE(testing::creep_drift(quiet(1)), 0.02);
  EXPECT_GE(testing::creep_drift(quiet(2)), 0.02);
}

TEST(Hysteresis, LoopAreaWidthAndRateIndependence) {
  const auto c = quiet();
  const double a20 = testing::sweep_loop_area(c, 20.0);
  const double a40 = testing::sweep_loop_area(c, 40.0);
  EXPECT_GT(a20, 0.01);
  EXPECT_LT(std::abs(a40 - a20) / a20, 0.10);
  EXPECT_GE(testing::sweep_loop_width(c, 20.0), 0.2);
}

TEST(Hysteresis, DisabledHysteresisAndCreepShrinkLoop) {
  auto c = quiet();
  const double full = testing::sweep_loop_area(c, 20.0);
  c.hysteresis_weight = 0.0;
  c.creep_weight = 0.0;
  // What remains is viscous and scales with the sweep rate.
  const double a20 = testing::sweep_loop_area(c, 20.0);
  const double a40 = testing::sweep_loop_area(c, 40.0);
  EXPECT_LT(a20, 0.5 * full);
  EXPECT_NEAR(a40 / a20, 0.5, 0.1);
  EXPECT_LT(testing::sweep_loop_area(c, 80.0), 0.1 * full);
}

TEST(Calibration, StepResponseSettlesInTargetWindow) {
  const double t = testing::step_settling_time(quiet());
  EXPECT_GE(t, 0.5);
  EXPECT_LE(t, 1.5);
}

TEST(Measure, ZeroNoiseIsExact) {
  std::mt19937_64 rng(1);
  PlantState s;
  s.phi = 0.123;
  EXPECT_EQ(measure(s, 0.0, rng), 0.123);
}

TEST(Measure, SeededNoiseIsReproducible) {
  Plant a(PlantConfig::setup(1), 99), b(PlantConfig::setup(1), 99), other(PlantConfig::setup(1), 100);
  bool differs = false;
  for (int n = 0; n < 100; ++n) {
    const double ma = a.measure();
    EXPECT_EQ(ma, b.measure());
    differs = differs || ma != other.measure();
  }
  EXPECT_TRUE(differs);
}

TEST(Measure, SampleMeanConverges) {
  std::mt19937_64 rng(17);
  PlantState s;
  s.phi = 0.4;
  const double sigma = 0.002;
  double sum = 0.0;
  for (int n = 0; n < 10000; ++n) sum += measure(s, sigma, rng);
  EXPECT_NEAR(sum / 10000.0, 0.4, 3.0 * sigma / 100.0);
}

TEST(Measure, PlantReadingStaysInSensorRange) {
  auto c = PlantConfig::setup(1);
  c.noise_std = 0.01;
  Plant p(c, 3);
  for (int n = 0; n < 200; ++n) EXPECT_LE(std::abs(p.measure()), 1.0);
}

TEST(Gravity, LoadPullsArmDown) {
  const auto c = quiet(2);
  auto s = rest_state(c);
  auto flat = quiet(1);
  auto s_flat = rest_state(flat);
  for (int n = 0; n < 300; ++n) {
    s = plant_step(s, 1.0, 0.01, c);
    s_flat = plant_step(s_flat, 1.0, 0.01, flat);
  }
  EXPECT_LT(s.phi, s_flat.phi);
}

}  // namespace
}  // namespace anodec::plant
