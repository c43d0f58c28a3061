#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "tclpop/errors.hpp"
#include "tclpop/pde.hpp"

using namespace tclpop;
using namespace tclpop::pde;

namespace {

PdeConfig base(std::size_t cells = 200) {
  PdeConfig c;
  c.cells = cells;
  return c;
}

// Drift that vanishes everywhere.
DriftFields still(double sigma = 0.0) { return DriftFields{30.0, 1e300, 1.0, 0.0, sigma}; }

PdfFields zero_fields() { return PdfFields::uniform_deadband(base(), 20.0, 0.0, 0.0); }

void fill(SegmentField& s, double (*density)(double)) {
  for (std::size_t i = 0; i < s.size(); ++i) s.mass[i] = density(s.center(i)) * s.dx();
}

double mean_position(const SegmentField& s) {
  double m = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    m += s.mass[i];
    mx += s.mass[i] * s.center(i);
  }
  return mx / m;
}

}  // namespace

TEST(Flux, Examples) {
  EXPECT_DOUBLE_EQ(probability_flow(0.0, 0.0, 0.1, 3.0, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(probability_flow(2.0, 2.0, 0.1, 1.5, 0.0), -3.0);
  EXPECT_DOUBLE_EQ(probability_flow(2.0, 2.0, 0.1, -1.5, 0.0), 3.0);
  // f = x sampled at x = 0.95 and 1.05
  EXPECT_NEAR(probability_flow(0.95, 1.05, 0.1, 0.0, 0.2), 0.02, 1e-15);
}

TEST(BoundaryConditions, ZeroFieldsGiveZeroGhosts) {
  const auto g = apply_boundary_conditions(zero_fields());
  for (double v : {g.f0a_left, g.f0a_right, g.f0b_left, g.f0b_right, g.f1b_left, g.f1b_right,
                   g.f1c_left, g.f1c_right})
    EXPECT_EQ(v, 0.0);
  EXPECT_EQ(gamma_disturbance(zero_fields(), DriftFields::from(base(), 30.0), CouplingLaw{}, 2.5), 0.0);
}

TEST(BoundaryConditions, WallsAndAbsorbingEdges) {
  const auto f = PdfFields::uniform_deadband(base(), 20.0, 0.6, 0.4);
  const auto flows = face_flows(f, DriftFields::from(base(), 30.0), 0.0);
  EXPECT_EQ(flows.f0a.front(), 0.0);
  EXPECT_EQ(flows.f1c.back(), 0.0);
  EXPECT_GT(flows.absorbed_upper, 0.0);  // OFF units warm into the upper edge
  EXPECT_GT(flows.absorbed_lower, 0.0);  // ON units cool into the lower edge
  EXPECT_DOUBLE_EQ(flows.f0a.back(), flows.f0b.front());
  EXPECT_DOUBLE_EQ(flows.f1b.back(), flows.f1c.front());
}

TEST(Step, NoDynamicsLeavesFieldsUnchanged) {
  auto f = PdfFields::uniform_deadband(base(), 20.0, 0.6, 0.4);
  const auto next = step(f, still(), CouplingLaw{0.0}, 0.0, 1.0);
  for (std::size_t i = 0; i < f.f0b.size(); ++i) {
    EXPECT_NEAR(next.f0b.mass[i], f.f0b.mass[i], 1e-15);
    EXPECT_NEAR(next.f1b.mass[i], f.f1b.mass[i], 1e-15);
  }
  EXPECT_EQ(next.x_sp, 20.0);
}

TEST(Step, SetPointShiftTranslatesTheProfile) {
  // Absolute transport velocity is alpha - u; with alpha = 0 a bump inside
  // the deadband moves by -u t while the deadband moves by +u t.
  auto f = zero_fields();
  fill(f.f0b, [](double x) { return std::exp(-std::pow((x - 20.0) / 0.03, 2)); });
  const double before = mean_position(f.f0b);
  const double u = 0.5, dt = 0.5;
  for (int n = 0; n < 120; ++n) f = step(f, still(), CouplingLaw{0.0}, u, dt);
  const double t_h = 120 * dt / 3600.0;
  EXPECT_NEAR(mean_position(f.f0b) - before, -u * t_h, 1e-9);
  EXPECT_NEAR(f.x_sp, 20.0 + u * t_h, 1e-12);
}

TEST(Step, ConservesMassPerStep) {
  auto f = PdfFields::uniform_deadband(base(), 20.0, 0.6, 0.4);
  const auto drift = DriftFields::from(base(), 30.0);
  for (int n = 0; n < 2000; ++n) {
    const double before = f.total_mass();
    f = step(f, drift, CouplingLaw{0.03}, n % 2 ? 1.5 : -2.0, 0.5);
    ASSERT_NEAR(f.total_mass(), before, 1e-12);
  }
  EXPECT_NEAR(f.total_mass(), 1.0, 1e-12);
  EXPECT_GE(f.min_density(), -1e-10);
}

TEST(Step, RejectsUnstableSteps) {
  const auto f = PdfFields::uniform_deadband(base(), 20.0, 0.6, 0.4);
  const auto drift = DriftFields::from(base(), 30.0);
  const double limit = max_stable_dt(f, drift, 0.0);
  EXPECT_GT(limit, 0.0);
  EXPECT_NO_THROW(step(f, drift, CouplingLaw{}, 0.0, limit));
  EXPECT_THROW(step(f, drift, CouplingLaw{}, 0.0, 1.01 * limit), StepSizeError);
  EXPECT_THROW(step(f, drift, CouplingLaw{}, 0.0, 0.0), StepSizeError);
}

TEST(Step, ReflectiveWallHoldsMass) {
  auto f = zero_fields();
  fill(f.f0a, [](double x) { return std::exp(-std::pow((x - 15.3) / 0.2, 2)); });
  const double mass = f.f0a.total();
  const DriftFields drift = still(0.1);
  for (int n = 0; n < 5000; ++n) f = step(f, drift, CouplingLaw{0.0}, 0.0, 0.5);
  EXPECT_NEAR(f.f0a.total(), mass, 1e-12 * mass);
  EXPECT_LT(mean_position(f.f0a) - 15.3, 0.1);
}

TEST(Step, LeakyEdgeLosesMassMonotonically) {
  // Negative control: drop the transfer at the deadband edges.
  auto f = PdfFields::uniform_deadband(base(), 20.0, 0.6, 0.4);
  const auto drift = DriftFields::from(base(), 30.0);
  const double dt_h = 1.0 / 3600.0;
  double previous = f.total_mass();
  for (int n = 0; n < 200; ++n) {
    const auto flows = face_flows(f, drift, 0.0);
    for (auto [seg, fl] : {std::pair{&f.f0a, &flows.f0a}, {&f.f0b, &flows.f0b},
                           {&f.f1b, &flows.f1b}, {&f.f1c, &flows.f1c}})
      for (std::size_t i = 0; i < seg->size(); ++i)
        seg->mass[i] += dt_h * ((*fl)[i + 1] - (*fl)[i]);
    ASSERT_LT(f.total_mass(), previous);
    previous = f.total_mass();
  }
  EXPECT_GT(1.0 - previous, 1e-4);
}

TEST(Coupling, StructuralConditions) {
  EXPECT_TRUE(CouplingLaw{0.03}.satisfies_structural_conditions());
  EXPECT_TRUE(CouplingLaw{0.5}.satisfies_structural_conditions());
  EXPECT_FALSE(CouplingLaw{0.6}.satisfies_structural_conditions());
  EXPECT_LE(CouplingLaw{0.03}.g(0.0, 2.0), 0.0);
  EXPECT_GE(CouplingLaw{0.03}.g(2.0, 0.0), 0.0);
}

TEST(Gamma, DriftTermsOnlyWithoutDiffusionAndCoupling) {
  auto f = PdfFields::uniform_deadband(base(), 20.0, 0.6, 0.4);
  DriftFields drift = DriftFields::from(base(), 30.0);
  drift.sigma = 0.0;
  // Uniform deadband densities 0.6 / 0.5 and 0.4 / 0.5.
  const double f0 = 1.2, f1 = 0.8;
  const double expected = 14.0 / 2.5 * (drift.alpha1(20.25) * f1 + drift.alpha0(19.75) * f0);
  EXPECT_NEAR(gamma_disturbance(f, drift, CouplingLaw{0.0}, 2.5), expected, 1e-12);
}

TEST(Gamma, OneSidedStencilIsExactForLinearProfiles) {
  // Densities vanishing linearly at the absorbing edges.
  auto f = zero_fields();
  fill(f.f0b, [](double x) { return 3.0 * (20.25 - x); });
  fill(f.f1b, [](double x) { return 5.0 * (x - 19.75); });
  const auto d = boundary_derivatives(f);
  EXPECT_NEAR(d.df0_upper_minus, -3.0, 1e-9);
  EXPECT_NEAR(d.df1_lower_plus, 5.0, 1e-9);
}

TEST(Gamma, EdgeValuesExtrapolateFromTheDeadband) {
  auto f = zero_fields();
  fill(f.f0b, [](double x) { return 1.0 + 4.0 * (x - 19.75); });
  fill(f.f1b, [](double x) { return 2.0 - 4.0 * (x - 20.25); });
  fill(f.f1c, [](double) { return 7.0; });
  EXPECT_NEAR(f.f0_at_lower(), 1.0, 1e-12);
  EXPECT_NEAR(f.f1_at_upper(), 2.0, 1e-12);
}

TEST(Aggregate, Examples) {
  auto all_on = PdfFields::uniform_deadband(base(), 20.0, 0.0, 1.0);
  auto out = aggregate_outputs(all_on);
  EXPECT_NEAR(out.y_total_norm, 1.0, 1e-12);
  EXPECT_NEAR(out.y_norm, 1.0, 1e-12);

  auto f = PdfFields::uniform_deadband(base(), 20.0, 0.55, 0.4);
  f.f0a.mass.back() = 0.05;
  out = aggregate_outputs(f);
  EXPECT_NEAR(out.y_norm, out.y_total_norm - 0.05, 1e-12);

  auto g = PdfFields::uniform_deadband(base(), 20.0, 0.6, 0.3);
  g.f1c.mass.front() = 0.1;
  out = aggregate_outputs(g);
  EXPECT_NEAR(out.y_total_norm, 0.4, 1e-12);
  EXPECT_NEAR(out.y_norm, 0.5, 1e-12);
}

TEST(Config, Validation) {
  PdeConfig c;
  c.lambda = 0.6;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.cells = 2;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.cfl = 0.9;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  EXPECT_THROW(PdfFields::uniform_deadband(c, 15.1, 0.6, 0.4), ConfigError);
}

TEST(Conservation, HistoryAndCsv) {
  EXPECT_NEAR(verify_conservation({1.0, 1.0 + 1e-9, 1.0 - 3e-9}), 3e-9, 1e-15);
  std::ostringstream out;
  write_fields_csv(out, PdfFields::uniform_deadband(base(4), 20.0, 0.6, 0.4));
  const std::string s = out.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "x,f0,f1");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + 4 * 3);
}

namespace {

// Densities proportional to sin(pi y) on the deadband, vanishing at both edges.
PdfFields smooth_deadband(std::size_t cells) {
  auto f = PdfFields::uniform_deadband(base(cells), 20.0, 0.6, 0.4);
  for (auto [seg, target] : {std::pair{&f.f0b, 0.6}, {&f.f1b, 0.4}}) {
    const double n = static_cast<double>(seg->size());
    for (std::size_t i = 0; i < seg->size(); ++i)
      seg->mass[i] = 0.5 * target *
                     (std::cos(std::numbers::pi * i / n) - std::cos(std::numbers::pi * (i + 1) / n));
  }
  return f;
}

std::vector<double> y_total_series(PdfFields f, double u, double hours) {
  const auto drift = DriftFields::from(base(), 30.0);
  std::vector<double> out;
  for (int s = 0; s < static_cast<int>(hours * 60); ++s) {
    out.push_back(aggregate_outputs(f).y_total_norm);
    const std::size_t n = static_cast<std::size_t>(std::ceil(60.0 / (0.9 * max_stable_dt(f, drift, u))));
    for (std::size_t k = 0; k < n; ++k) f = step(f, drift, CouplingLaw{0.03}, u, 60.0 / n);
  }
  return out;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Convergence, HalvingTheGridHalvesTheSelfConvergenceError) {
  for (double u : {0.0, 0.3}) {
    const auto coarse = y_total_series(smooth_deadband(100), u, 1.0);
    const auto mid = y_total_series(smooth_deadband(200), u, 1.0);
    const auto fine = y_total_series(smooth_deadband(400), u, 1.0);
    EXPECT_GE(sup_diff(coarse, mid) / sup_diff(mid, fine), 1.8) << "u = " << u;
  }
}

TEST(SteadyState, EdgeTransfersBalanceAndExteriorMassIsSmall) {
  auto f = PdfFields::uniform_deadband(base(), 20.0, 0.6, 0.4);
  const auto drift = DriftFields::from(base(), 30.0);
  const CouplingLaw coupling{0.03};
  const double dt = 0.9 * max_stable_dt(f, drift, 0.0);
  for (int n = 0; n < static_cast<int>(40 * 3600 / dt); ++n) f = step(f, drift, coupling, 0.0, dt);
  const auto flows = face_flows(f, drift, 0.0);
  double forced = 0.0;
  for (std::size_t i = 0; i < f.f0b.size(); ++i) forced += coupling.g(f.f0b.mass[i], f.f1b.mass[i]);
  // ON mass is stationary: inflow at the upper edge plus forced switches equals outflow at the lower edge.
  EXPECT_NEAR(flows.absorbed_upper + forced, flows.absorbed_lower, 0.02 * flows.absorbed_lower);
  const auto out = aggregate_outputs(f);
  EXPECT_LE(std::abs(out.y_norm - out.y_total_norm), 1e-3);
}
