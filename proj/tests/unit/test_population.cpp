#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tclpop/errors.hpp"
#include "tclpop/population.hpp"

using namespace tclpop;

namespace {

TclUnit unit_at(double x, Mode mode, double lock = 0.0) {
  return TclUnit{TclParams{}, TclState{x, mode, lock}};
}

ThermostatSettings quiet() {
  ThermostatSettings t;
  t.sigma_w = 0.0;
  return t;
}

Population handmade(std::vector<TclUnit> units) {
  PopulationConfig cfg;
  cfg.n_units = units.size();
  return Population(cfg, std::move(units));
}

}  // namespace

TEST(StepUnit, OffUnitWarmsAtTheEtpRate) {
  // x+ = 20 + (30 - 20) / (10 * 2) * 30 / 3600
  const auto r = step_unit(unit_at(20.0, Mode::kOff), 30.0, OperatingConditions{}, quiet(), 0.0, false);
  EXPECT_NEAR(r.state.x, 20.004166666666666, 1e-12);
  EXPECT_EQ(r.state.mode, Mode::kOff);
}

TEST(StepUnit, OnUnitCoolsAtTheEtpRate) {
  const auto r = step_unit(unit_at(20.0, Mode::kOn), 30.0, OperatingConditions{}, quiet(), 0.0, false);
  EXPECT_NEAR(r.state.x, 19.9925, 1e-12);
}

TEST(StepUnit, NoiseEntersWithSquareRootOfStep) {
  ThermostatSettings t = quiet();
  t.sigma_w = 0.01;
  const auto base = step_unit(unit_at(20.0, Mode::kOff), 3600.0, {}, quiet(), 0.0, false);
  const auto noisy = step_unit(unit_at(20.0, Mode::kOff), 3600.0, {}, t, 2.0, false);
  EXPECT_NEAR(noisy.state.x - base.state.x, 0.02, 1e-12);
}

TEST(StepUnit, CrossingTheUpperEdgeSwitchesOnDespiteLockout) {
  const auto r = step_unit(unit_at(20.2499, Mode::kOff, 300.0), 30.0, {}, quiet(), 0.0, false);
  EXPECT_EQ(r.state.mode, Mode::kOn);
  EXPECT_DOUBLE_EQ(r.state.lock_remaining, 360.0);
  EXPECT_FALSE(r.forced_toggle);
}

TEST(StepUnit, CrossingTheLowerEdgeSwitchesOff) {
  const auto r = step_unit(unit_at(19.7501, Mode::kOn), 30.0, {}, quiet(), 0.0, false);
  EXPECT_EQ(r.state.mode, Mode::kOff);
}

TEST(StepUnit, ForcedToggleRespectsLockout) {
  const auto locked = step_unit(unit_at(20.0, Mode::kOff, 100.0), 1.0, {}, quiet(), 0.0, true);
  EXPECT_EQ(locked.state.mode, Mode::kOff);
  EXPECT_DOUBLE_EQ(locked.state.lock_remaining, 99.0);
  const auto free = step_unit(unit_at(20.0, Mode::kOff, 0.0), 1.0, {}, quiet(), 0.0, true);
  EXPECT_EQ(free.state.mode, Mode::kOn);
  EXPECT_TRUE(free.forced_toggle);
}

TEST(StepUnit, SafeBorderVetoesToggleNearOwnEdge) {
  // Border = 0.05 * 0.5 = 0.025 degC from the lower edge for OFF units.
  const auto near = step_unit(unit_at(19.76, Mode::kOff), 1.0, {}, quiet(), 0.0, true);
  EXPECT_EQ(near.state.mode, Mode::kOff);
  const auto far = step_unit(unit_at(19.80, Mode::kOff), 1.0, {}, quiet(), 0.0, true);
  EXPECT_EQ(far.state.mode, Mode::kOn);
}

TEST(StepUnit, WallsReflect) {
  ThermostatSettings t = quiet();
  t.sigma_w = 1.0;
  // 15.1 - 0.655 - 1 = 13.445 reflects to 16.555.
  const auto r = step_unit(unit_at(15.1, Mode::kOn), 3600.0, {}, t, -1.0, false);
  EXPECT_NEAR(r.state.x, 16.555, 1e-12);
}

TEST(Population, LognormalParametersKeepTheirMean) {
  PopulationConfig cfg;
  cfg.n_units = 100000;
  cfg.seed = 3;
  const Population pop = sample_population(cfg);
  double sr = 0.0, sc = 0.0;
  for (const auto& u : pop.units()) {
    sr += u.params.R;
    sc += u.params.C;
  }
  // Lognormal sd = mean * sqrt(exp(0.04) - 1); five standard errors over 1e5 draws.
  const double tol_r = 5.0 * 2.0 * std::sqrt(std::exp(0.04) - 1.0) / std::sqrt(1e5);
  EXPECT_NEAR(sr / 1e5, 2.0, tol_r);
  EXPECT_NEAR(sc / 1e5, 10.0, 5.0 * tol_r);
}

TEST(Population, InitStatesSplitsExactly) {
  PopulationConfig cfg;
  cfg.n_units = 1001;
  Population pop = sample_population(cfg);
  init_states(pop, 21.0, 0.5, 0.4);
  EXPECT_EQ(pop.count_on(), 400u);
  for (const auto& u : pop.units()) {
    EXPECT_GT(u.state.x, 20.75);
    EXPECT_LT(u.state.x, 21.25);
  }
  EXPECT_DOUBLE_EQ(pop.conditions().x_sp, 21.0);
  EXPECT_EQ(pop.step_index(), 0u);
}

TEST(Population, SetPointMovesBeforeUnitsStep) {
  Population pop = handmade({unit_at(20.0, Mode::kOff)});
  pop.step(3600.0, 30.0, 0.5, 1);
  EXPECT_DOUBLE_EQ(pop.conditions().x_sp, 20.5);
}

TEST(Population, ResultsDoNotDependOnThreadCount) {
  PopulationConfig cfg;
  cfg.n_units = 5000;
  cfg.seed = 11;
  Population a = sample_population(cfg);
  init_states(a, 20.0, 0.5, 0.4);
  Population b = a;
  for (int n = 0; n < 300; ++n) {
    a.step(1.0, 30.0, 0.3, 1);
    b.step(1.0, 30.0, 0.3, 4);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a.units()[i].state.x, b.units()[i].state.x);
    ASSERT_EQ(a.units()[i].state.mode, b.units()[i].state.mode);
  }
}

TEST(Population, ForcedToggleRateMatchesConfiguredProbability) {
  PopulationConfig cfg;
  cfg.n_units = 20000;
  cfg.p_f = 36.0;  // 1% per second
  Population pop = sample_population(cfg);
  init_states(pop, 20.0, 0.5, 0.4);
  std::size_t requests = 0;
  for (int n = 0; n < 50; ++n) requests += pop.step(1.0, 30.0, 0.0, 1).forced_requests;
  const double expected = 0.01 * 20000 * 50;
  EXPECT_NEAR(static_cast<double>(requests), expected, 5.0 * std::sqrt(expected));
}

TEST(Population, OutputCountsMassOutsideTheDeadband) {
  Population pop = handmade({unit_at(20.0, Mode::kOn), unit_at(20.3, Mode::kOn),
                             unit_at(19.6, Mode::kOff), unit_at(20.0, Mode::kOff)});
  EXPECT_DOUBLE_EQ(aggregate_power(pop).y_total_norm, 0.5);
  EXPECT_DOUBLE_EQ(aggregate_power(pop).y_total_kw, 2.0 * 14.0 / 2.5);
  // 0.5 + 0.25 (ON above) - 0.25 (OFF below)
  EXPECT_DOUBLE_EQ(measured_output(pop), 0.5);
}

TEST(Population, ValidationRejectsBadConfigs) {
  PopulationConfig cfg;
  cfg.n_units = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.x_L = 30.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  Population pop = handmade({unit_at(20.0, Mode::kOff)});
  EXPECT_THROW(init_states(pop, 20.0, 0.5, 1.5), ConfigError);
}
