#include "tclpop/errdyn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tclpop/errors.hpp"

namespace tclpop::errdyn {

namespace {

constexpr double kSecondsPerHour = 3600.0;
constexpr double kSnapRelative = 1e-13;

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

void ErrorOdeSpec::validate() const {
  if (!(k > 0.0)) throw ConfigError("errdyn: k must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("errdyn: gamma must lie in (0, 1)");
  if (!(P > 0.0 && eta > 0.0)) throw ConfigError("errdyn: P and eta must be positive");
  if (!(cap_fraction > 0.0 && cap_fraction <= 1.0))
    throw ConfigError("errdyn: cap_fraction must lie in (0, 1]");
}

double ErrorOdeSpec::rhs(double t_h, double e) const {
  return -gain() * std::pow(std::abs(e), gamma) * sgn(e) + gamma_at(t_h, e);
}

std::vector<ErrorSample> simulate_error_ode(const ErrorOdeSpec& spec, double dt_s,
                                            double horizon_s) {
  spec.validate();
  if (!(dt_s > 0.0)) throw ConfigError("errdyn: dt must be positive");
  if (!(horizon_s >= 0.0)) throw ConfigError("errdyn: horizon must be non-negative");

  const double c = spec.gain();
  const double dt_h = dt_s / kSecondsPerHour;
  const double horizon_h = horizon_s / kSecondsPerHour;
  const double snap = kSnapRelative * std::abs(spec.e0);

  std::vector<ErrorSample> trace{{0.0, spec.e0}};
  double t = 0.0;
  double e = spec.e0;
  while (t < horizon_h) {
    const double g = spec.gamma_at(t, e);
    // Local scale: |e|, or the equilibrium size when the disturbance holds e near it.
    const double e_floor = g != 0.0 ? 0.1 * std::pow(std::abs(g) / c, 1.0 / spec.gamma) : 0.0;
    const double scale = std::max(std::abs(e), e_floor);
    double h = std::min(dt_h, horizon_h - t);
    if (scale > 0.0) h = std::min(h, spec.cap_fraction * std::pow(scale, 1.0 - spec.gamma) / c);

    double next = e + h * (-c * std::pow(std::abs(e), spec.gamma) * sgn(e) + g);
    if (g == 0.0 && (sgn(next) != sgn(e) || std::abs(next) <= snap)) next = 0.0;

    t += h;
    e = next;
    trace.push_back({t * kSecondsPerHour, e});
  }
  return trace;
}

std::optional<double> zero_crossing_time(const std::vector<ErrorSample>& trace) {
  if (trace.empty()) return std::nullopt;
  if (trace.front().e == 0.0) return trace.front().t_s;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const auto& a = trace[i - 1];
    const auto& b = trace[i];
    if (b.e == 0.0) return b.t_s;
    if (sgn(a.e) != sgn(b.e)) return a.t_s + (b.t_s - a.t_s) * a.e / (a.e - b.e);
  }
  return std::nullopt;
}

double closed_form_settling_time(double e0, double k, double gamma, double P, double eta) {
  return eta * std::pow(std::abs(e0), 1.0 - gamma) / (P * k * (1.0 - gamma)) * kSecondsPerHour;
}

double steady_residual(double gamma_bar, double k, double gamma, double P, double eta) {
  return std::pow(eta * std::abs(gamma_bar) / (P * k), 1.0 / gamma);
}

double ftiss_gain(double s, double C0, double k, double P, double eta, double gamma) {
  if (!(C0 > 0.0 && C0 < k)) throw ConfigError("ftiss_gain: C0 must lie in (0, k)");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("ftiss_gain: gamma must lie in (0, 1)");
  if (s < 0.0) throw DomainError("ftiss_gain: s must be non-negative");
  return std::pow(eta * s / (P * C0), 1.0 / gamma);
}

double tail_sup(const std::vector<ErrorSample>& trace, double tail_fraction) {
  if (trace.empty()) return 0.0;
  const double t_end = trace.back().t_s;
  const double t_from = t_end - tail_fraction * (t_end - trace.front().t_s);
  double sup = 0.0;
  for (const auto& s : trace)
    if (s.t_s >= t_from) sup = std::max(sup, std::abs(s.e));
  return sup;
}

LyapunovReport lyapunov_decay_check(const std::vector<ErrorSample>& trace, const ErrorOdeSpec& spec,
                                    double C0, double rel_tol) {
  spec.validate();
  LyapunovReport report;
  report.samples = trace.size();
  report.worst_margin = -std::numeric_limits<double>::infinity();
  const double expo = 0.5 * (1.0 + spec.gamma);
  const double decay = spec.P / spec.eta * (spec.k - C0) * std::pow(2.0, expo);
  for (const auto& s : trace) {
    const double t_h = s.t_s / kSecondsPerHour;
    const double g = spec.gamma_at(t_h, s.e);
    const double chi = ftiss_gain(std::abs(g), C0, spec.k, spec.P, spec.eta, spec.gamma);
    if (s.e == 0.0 || std::abs(s.e) < chi) continue;
    ++report.checked;
    const double v = 0.5 * s.e * s.e;
    const double lhs = s.e * spec.rhs(t_h, s.e);
    const double rhs = -decay * std::pow(v, expo);
    const double margin = lhs - rhs;
    report.worst_margin = std::max(report.worst_margin, margin);
    if (margin > rel_tol * std::abs(rhs)) ++report.violations;
  }
  if (report.checked == 0) report.worst_margin = 0.0;
  return report;
}

void write_trace_csv(std::ostream& out, const std::vector<ErrorSample>& trace) {
  out << "t_s,e\n";
  for (const auto& s : trace) fmt::print(out, "{:.9g},{:.12g}\n", s.t_s, s.e);
}

}  // namespace tclpop::errdyn
