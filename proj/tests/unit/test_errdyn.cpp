#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tclpop/errdyn.hpp"
#include "tclpop/errors.hpp"

using namespace tclpop::errdyn;

namespace {

ErrorOdeSpec nominal(double e0, double gamma = 0.5) {
  ErrorOdeSpec s;
  s.e0 = e0;
  s.gamma = gamma;
  return s;
}

}  // namespace

TEST(ErrorDynamics, ClosedFormSettlingTime) {
  // 2.5 * sqrt(0.1) / (14 * 8 * 0.5) h
  EXPECT_NEAR(closed_form_settling_time(0.1, 8, 0.5, 14, 2.5), 0.014117310982894551 * 3600, 1e-9);
  EXPECT_DOUBLE_EQ(closed_form_settling_time(0.0, 8, 0.5, 14, 2.5), 0.0);
}

TEST(ErrorDynamics, FtissGain) {
  EXPECT_NEAR(ftiss_gain(0.1, 4.0, 8.0, 14.0, 2.5, 0.5), 1.992984693877551e-05, 1e-18);
  EXPECT_DOUBLE_EQ(ftiss_gain(0.0, 4.0, 8.0, 14.0, 2.5, 0.5), 0.0);
  EXPECT_THROW(ftiss_gain(0.1, 8.0, 8.0, 14.0, 2.5, 0.5), tclpop::ConfigError);
  EXPECT_THROW(ftiss_gain(-0.1, 4.0, 8.0, 14.0, 2.5, 0.5), tclpop::DomainError);
}

TEST(ErrorDynamics, ZeroCrossingMatchesClosedForm) {
  for (double g : {0.3, 0.5, 0.7}) {
    for (double e0 : {1e-3, 0.1, 1.0}) {
      const double T = closed_form_settling_time(e0, 8, g, 14, 2.5);
      const auto trace = simulate_error_ode(nominal(e0, g), 1.0, 2 * T + 1);
      const auto tz = zero_crossing_time(trace);
      ASSERT_TRUE(tz.has_value());
      EXPECT_LT(std::abs(*tz - T) / T, 0.02) << "gamma " << g << " e0 " << e0;
    }
  }
}

TEST(ErrorDynamics, AbsorbedAtOrigin) {
  const auto trace = simulate_error_ode(nominal(0.1), 1.0, 120.0);
  EXPECT_EQ(trace.back().e, 0.0);
  const auto zero = simulate_error_ode(nominal(0.0), 1.0, 10.0);
  for (const auto& s : zero) EXPECT_EQ(s.e, 0.0);
  EXPECT_EQ(zero_crossing_time(zero).value(), 0.0);
}

TEST(ErrorDynamics, OddSymmetry) {
  auto plus = nominal(0.3);
  plus.disturbance = [](double t, double) { return 2.0 + std::sin(20 * t); };
  auto minus = nominal(-0.3);
  minus.disturbance = [](double t, double) { return -(2.0 + std::sin(20 * t)); };
  const auto a = simulate_error_ode(plus, 1.0, 200.0);
  const auto b = simulate_error_ode(minus, 1.0, 200.0);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].e, -b[i].e);
}

TEST(ErrorDynamics, ConstantDisturbanceSettlesAtTheResidual) {
  auto s = nominal(0.2);
  s.disturbance = [](double, double) { return 4.48; };
  const auto trace = simulate_error_ode(s, 1.0, 300.0);
  // (2.5 * 4.48 / (14 * 8))^2 = 0.01
  EXPECT_NEAR(steady_residual(4.48, 8, 0.5, 14, 2.5), 0.01, 1e-15);
  EXPECT_NEAR(trace.back().e, 0.01, 1e-6);
  EXPECT_LE(tail_sup(trace, 0.2), ftiss_gain(4.48, 4.0, 8.0, 14.0, 2.5, 0.5));
}

TEST(Lyapunov, NominalTraceHasNoViolations) {
  const auto spec = nominal(0.5);
  const auto r = lyapunov_decay_check(simulate_error_ode(spec, 1.0, 200.0), spec, 4.0);
  EXPECT_GT(r.checked, 0u);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_LE(r.worst_margin, 0.0);
}

TEST(Lyapunov, EmptyErrorIsVacuous) {
  const auto spec = nominal(0.0);
  const auto r = lyapunov_decay_check(simulate_error_ode(spec, 1.0, 10.0), spec, 4.0);
  EXPECT_EQ(r.checked, 0u);
  EXPECT_EQ(r.violations, 0u);
}

TEST(Lyapunov, AdversarialDisturbanceInsideTheGainCondition) {
  constexpr double C0 = 4.0;
  auto spec = nominal(0.5);
  spec.disturbance = [](double, double e) {
    return 0.9 * 14.0 / 2.5 * C0 * std::sqrt(std::abs(e)) * (e > 0 ? 1.0 : -1.0);
  };
  const auto r = lyapunov_decay_check(simulate_error_ode(spec, 1.0, 200.0), spec, C0);
  EXPECT_GT(r.checked, 0u);
  EXPECT_EQ(r.violations, 0u);
}

TEST(ErrorDynamics, ValidationAndCsv) {
  auto s = nominal(0.1);
  s.gamma = 1.0;
  EXPECT_THROW(simulate_error_ode(s, 1.0, 1.0), tclpop::ConfigError);
  EXPECT_THROW(simulate_error_ode(nominal(0.1), 0.0, 1.0), tclpop::ConfigError);
  std::ostringstream out;
  write_trace_csv(out, {{0.0, 0.1}, {1.0, 0.05}});
  EXPECT_EQ(out.str(), "t_s,e\n0,0.1\n1,0.05\n");
}
