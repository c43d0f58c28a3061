#include "tclpop/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tclpop/errors.hpp"

namespace tclpop::pde {

namespace {

constexpr double kSecondsPerHour = 3600.0;

SegmentField make_segment(double left, double right, std::size_t cells, double mass) {
  SegmentField s;
  s.left = left;
  s.right = right;
  s.mass.assign(cells, mass / static_cast<double>(cells));
  return s;
}

/// Derivative at a boundary point from its value and the first two cell
/// centres on one side (at distances h/2 and 3h/2). `direction` is +1 when the
/// cells lie to the right of the boundary, -1 when to the left.
double one_sided_derivative(double boundary, double near, double far, double h, double direction) {
  return direction * (-8.0 * boundary + 9.0 * near - far) / (3.0 * h);
}

struct SegmentSpeeds {
  double a = 0.0, b = 0.0, c = 0.0;
};

}  // namespace

void PdeConfig::validate() const {
  if (!(R > 0.0 && C > 0.0 && P > 0.0 && eta > 0.0))
    throw ConfigError("pde: R, C, P and eta must be positive");
  if (!(sigma >= 0.0)) throw ConfigError("pde: sigma must be non-negative");
  if (!(lambda >= 0.0 && 2.0 * lambda <= 1.0))
    throw ConfigError("pde: coupling rate must satisfy 0 <= 2 lambda <= 1");
  if (!(delta0 > 0.0)) throw ConfigError("pde: delta0 must be positive");
  if (!(x_L < x_H)) throw ConfigError("pde: x_L must be below x_H");
  if (cells < 3) throw ConfigError("pde: need at least three cells per segment");
  if (!(cfl > 0.0 && cfl <= 0.5)) throw ConfigError("pde: cfl must lie in (0, 0.5]");
}

double SegmentField::total() const noexcept {
  return std::accumulate(mass.begin(), mass.end(), 0.0);
}

PdfFields PdfFields::uniform_deadband(const PdeConfig& cfg, double x_sp0, double off_mass,
                                      double on_mass) {
  cfg.validate();
  PdfFields f;
  f.x_sp = x_sp0;
  f.delta0 = cfg.delta0;
  f.x_L = cfg.x_L;
  f.x_H = cfg.x_H;
  if (!(f.x_L < f.lower() && f.upper() < f.x_H))
    throw ConfigError("pde: deadband must lie strictly inside (x_L, x_H)");
  f.f0a = make_segment(f.x_L, f.lower(), cfg.cells, 0.0);
  f.f0b = make_segment(f.lower(), f.upper(), cfg.cells, off_mass);
  f.f1b = make_segment(f.lower(), f.upper(), cfg.cells, on_mass);
  f.f1c = make_segment(f.upper(), f.x_H, cfg.cells, 0.0);
  return f;
}

double PdfFields::total_mass() const noexcept {
  return f0a.total() + f0b.total() + f1b.total() + f1c.total();
}

double PdfFields::min_density() const noexcept {
  double m = std::numeric_limits<double>::infinity();
  for (const SegmentField* s : {&f0a, &f0b, &f1b, &f1c})
    for (std::size_t i = 0; i < s->size(); ++i) m = std::min(m, s->density(i));
  return m;
}

double PdfFields::f0_at_lower() const noexcept {
  return std::max(0.0, 1.5 * f0b.density(0) - 0.5 * f0b.density(1));
}

double PdfFields::f1_at_upper() const noexcept {
  const std::size_t n = f1b.size();
  return std::max(0.0, 1.5 * f1b.density(n - 1) - 0.5 * f1b.density(n - 2));
}

BoundaryDensities PdfFields::boundary_densities() const noexcept {
  return {f0_at_lower(), f1_at_upper(), f0b.dx()};
}

double probability_flow(double f_left, double f_right, double spacing, double velocity,
                        double sigma) noexcept {
  const double diffusive = 0.5 * sigma * sigma * (f_right - f_left) / spacing;
  const double upwind = velocity >= 0.0 ? f_left : f_right;
  return diffusive - velocity * upwind;
}

GhostValues apply_boundary_conditions(const PdfFields& f) noexcept {
  GhostValues g;
  g.f0a_left = f.f0a.density(0);
  g.f0a_right = f.f0b.density(0);
  g.f0b_left = f.f0a.density(f.f0a.size() - 1);
  g.f0b_right = -f.f0b.density(f.f0b.size() - 1);
  g.f1b_left = -f.f1b.density(0);
  g.f1b_right = f.f1c.density(0);
  g.f1c_left = f.f1b.density(f.f1b.size() - 1);
  g.f1c_right = f.f1c.density(f.f1c.size() - 1);
  return g;
}

namespace {

FaceFlows compute_flows(const PdfFields& f, const DriftFields& drift, double u,
                        SegmentSpeeds* speeds) {
  const double sigma = drift.sigma;
  const double lo = f.lower();
  const double up = f.upper();
  const GhostValues ghost = apply_boundary_conditions(f);
  FaceFlows out;
  SegmentSpeeds sp;

  // I_a: x = x_L + y (lower - x_L), mesh velocity y u. Wall at x_L.
  {
    const SegmentField& s = f.f0a;
    const std::size_t n = s.size();
    out.f0a.assign(n + 1, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
      const double y = static_cast<double>(i) / static_cast<double>(n);
      const double v = drift.alpha0(s.left + y * s.length()) - u - y * u;
      sp.a = std::max(sp.a, std::abs(v));
      out.f0a[i] = probability_flow(s.density(i - 1), s.density(i), s.dx(), v, sigma);
    }
  }
  // f0 across the lower edge: continuous, both sides move with u.
  {
    const double v = drift.alpha0(lo) - 2.0 * u;
    sp.a = std::max(sp.a, std::abs(v));
    sp.b = std::max(sp.b, std::abs(v));
    const double spacing = 0.5 * (f.f0a.dx() + f.f0b.dx());
    const double flow = probability_flow(ghost.f0b_left, ghost.f0a_right, spacing, v, sigma);
    out.f0a.back() = flow;
    out.f0b.assign(f.f0b.size() + 1, 0.0);
    out.f0b.front() = flow;
  }
  // I_b: rigid translation with u.
  {
    const SegmentField& s0 = f.f0b;
    const SegmentField& s1 = f.f1b;
    const std::size_t n = s0.size();
    out.f1b.assign(n + 1, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
      const double x = s0.left + static_cast<double>(i) * s0.dx();
      const double v0 = drift.alpha0(x) - 2.0 * u;
      const double v1 = drift.alpha1(x) - 2.0 * u;
      sp.b = std::max({sp.b, std::abs(v0), std::abs(v1)});
      out.f0b[i] = probability_flow(s0.density(i - 1), s0.density(i), s0.dx(), v0, sigma);
      out.f1b[i] = probability_flow(s1.density(i - 1), s1.density(i), s1.dx(), v1, sigma);
    }
    // Absorbing upper edge for f0: face value zero.
    const double v0 = drift.alpha0(up) - 2.0 * u;
    const double last0 = s0.density(n - 1);
    out.f0b[n] = 0.5 * sigma * sigma * (ghost.f0b_right - last0) / s0.dx() - std::max(v0, 0.0) * last0;
    out.absorbed_upper = -out.f0b[n];
    // Absorbing lower edge for f1.
    const double v1 = drift.alpha1(lo) - 2.0 * u;
    const double first1 = s1.density(0);
    out.f1b[0] = 0.5 * sigma * sigma * (first1 - ghost.f1b_left) / s1.dx() - std::min(v1, 0.0) * first1;
    out.absorbed_lower = out.f1b[0];
    sp.b = std::max({sp.b, std::abs(v0), std::abs(v1)});
  }
  // f1 across the upper edge: continuous.
  {
    const double v = drift.alpha1(up) - 2.0 * u;
    sp.b = std::max(sp.b, std::abs(v));
    sp.c = std::max(sp.c, std::abs(v));
    const double spacing = 0.5 * (f.f1b.dx() + f.f1c.dx());
    const double flow = probability_flow(ghost.f1c_left, ghost.f1b_right, spacing, v, sigma);
    out.f1b.back() = flow;
    out.f1c.assign(f.f1c.size() + 1, 0.0);
    out.f1c.front() = flow;
  }
  // I_c: x = upper + y (x_H - upper), mesh velocity (1 - y) u. Wall at x_H.
  {
    const SegmentField& s = f.f1c;
    const std::size_t n = s.size();
    for (std::size_t i = 1; i < n; ++i) {
      const double y = static_cast<double>(i) / static_cast<double>(n);
      const double v = drift.alpha1(s.left + y * s.length()) - u - (1.0 - y) * u;
      sp.c = std::max(sp.c, std::abs(v));
      out.f1c[i] = probability_flow(s.density(i - 1), s.density(i), s.dx(), v, sigma);
    }
  }
  out.max_speed = std::max({sp.a, sp.b, sp.c});
  if (speeds) *speeds = sp;
  return out;
}

double stable_dt_h(const PdfFields& f, const SegmentSpeeds& sp, double sigma, double cfl) {
  double bound = std::numeric_limits<double>::infinity();
  const std::pair<const SegmentField*, double> segs[] = {
      {&f.f0a, sp.a}, {&f.f0b, sp.b}, {&f.f1c, sp.c}};
  for (const auto& [s, speed] : segs) {
    const double dx = s->dx();
    if (sigma > 0.0) bound = std::min(bound, dx * dx / (sigma * sigma));
    if (speed > 0.0) bound = std::min(bound, dx / speed);
  }
  return cfl * bound;
}

void apply_flows(SegmentField& s, const std::vector<double>& flows, double dt_h) {
  for (std::size_t i = 0; i < s.size(); ++i) s.mass[i] += dt_h * (flows[i + 1] - flows[i]);
}

}  // namespace

FaceFlows face_flows(const PdfFields& fields, const DriftFields& drift, double u) {
  return compute_flows(fields, drift, u, nullptr);
}

double max_stable_dt(const PdfFields& fields, const DriftFields& drift, double u, double cfl) {
  SegmentSpeeds sp;
  compute_flows(fields, drift, u, &sp);
  return stable_dt_h(fields, sp, drift.sigma, cfl) * kSecondsPerHour;
}

PdfFields step(const PdfFields& fields, const DriftFields& drift, const CouplingLaw& coupling,
               double u, double dt_s, double cfl) {
  SegmentSpeeds sp;
  const FaceFlows flows = compute_flows(fields, drift, u, &sp);
  const double dt_h = dt_s / kSecondsPerHour;
  const double limit_h = stable_dt_h(fields, sp, drift.sigma, cfl);
  if (!(dt_h > 0.0) || dt_h > limit_h * (1.0 + 1e-12))
    throw StepSizeError(fmt::format("pde::step: dt={} s exceeds stability bound {} s", dt_s,
                                    limit_h * kSecondsPerHour));

  PdfFields next = fields;
  apply_flows(next.f0a, flows.f0a, dt_h);
  apply_flows(next.f0b, flows.f0b, dt_h);
  apply_flows(next.f1b, flows.f1b, dt_h);
  apply_flows(next.f1c, flows.f1c, dt_h);

  // Mode transfer at the deadband edges: a point source on the interface face,
  // deposited in the cell downwind of it.
  const double v0 = drift.alpha0(fields.lower()) - 2.0 * u;
  const double v1 = drift.alpha1(fields.upper()) - 2.0 * u;
  (v0 >= 0.0 ? next.f0b.mass.front() : next.f0a.mass.back()) += dt_h * flows.absorbed_lower;
  (v1 <= 0.0 ? next.f1b.mass.back() : next.f1c.mass.front()) += dt_h * flows.absorbed_upper;

  // Forced switching inside the deadband, in mass form g * dx.
  for (std::size_t i = 0; i < next.f0b.size(); ++i) {
    const double transfer = dt_h * coupling.g(fields.f0b.mass[i], fields.f1b.mass[i]);
    next.f0b.mass[i] -= transfer;
    next.f1b.mass[i] += transfer;
  }

  next.x_sp = fields.x_sp + u * dt_h;
  next.f0a.right = next.lower();
  next.f0b.left = next.f1b.left = next.lower();
  next.f0b.right = next.f1b.right = next.upper();
  next.f1c.left = next.upper();
  return next;
}

BoundaryDerivatives boundary_derivatives(const PdfFields& f) noexcept {
  BoundaryDerivatives d;
  d.df1_lower_plus = one_sided_derivative(0.0, f.f1b.density(0), f.f1b.density(1), f.f1b.dx(), 1.0);
  d.df1_upper_plus =
      one_sided_derivative(f.f1_at_upper(), f.f1c.density(0), f.f1c.density(1), f.f1c.dx(), 1.0);
  const std::size_t na = f.f0a.size();
  d.df0_lower_minus = one_sided_derivative(f.f0_at_lower(), f.f0a.density(na - 1),
                                           f.f0a.density(na - 2), f.f0a.dx(), -1.0);
  const std::size_t nb = f.f0b.size();
  d.df0_upper_minus =
      one_sided_derivative(0.0, f.f0b.density(nb - 1), f.f0b.density(nb - 2), f.f0b.dx(), -1.0);
  return d;
}

double gamma_disturbance(const PdfFields& f, const DriftFields& drift, const CouplingLaw& coupling,
                         double eta) {
  const double scale = drift.P / eta;
  const BoundaryDerivatives d = boundary_derivatives(f);
  const double drift_terms =
      drift.alpha1(f.upper()) * f.f1_at_upper() + drift.alpha0(f.lower()) * f.f0_at_lower();
  const double diffusion_terms =
      d.df1_lower_plus + d.df1_upper_plus + d.df0_lower_minus + d.df0_upper_minus;
  double coupling_integral = 0.0;
  for (std::size_t i = 0; i < f.f0b.size(); ++i)
    coupling_integral += coupling.g(f.f0b.mass[i], f.f1b.mass[i]);
  return scale * drift_terms - 0.5 * drift.sigma * drift.sigma * scale * diffusion_terms +
         scale * coupling_integral;
}

AggregateOutputs aggregate_outputs(const PdfFields& f) noexcept {
  const double on_above = f.f1c.total();
  const double y_total = f.f1b.total() + on_above;
  return {y_total, y_total + on_above - f.f0a.total()};
}

double verify_conservation(const std::vector<double>& mass_history) noexcept {
  double worst = 0.0;
  for (double m : mass_history) worst = std::max(worst, std::abs(m - 1.0));
  return worst;
}

void write_fields_csv(std::ostream& out, const PdfFields& f) {
  out << "x,f0,f1\n";
  for (std::size_t i = 0; i < f.f0a.size(); ++i)
    fmt::print(out, "{:.6f},{:.9g},0\n", f.f0a.center(i), f.f0a.density(i));
  for (std::size_t i = 0; i < f.f0b.size(); ++i)
    fmt::print(out, "{:.6f},{:.9g},{:.9g}\n", f.f0b.center(i), f.f0b.density(i), f.f1b.density(i));
  for (std::size_t i = 0; i < f.f1c.size(); ++i)
    fmt::print(out, "{:.6f},0,{:.9g}\n", f.f1c.center(i), f.f1c.density(i));
}

}  // namespace tclpop::pde
