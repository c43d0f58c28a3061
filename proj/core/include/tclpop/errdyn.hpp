#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace tclpop::errdyn {

/// Disturbance Gamma(t_h, e). Most studies use a function of time only; the
/// error argument allows worst-case (state-dependent) disturbances.
using Disturbance = std::function<double(double t_h, double e)>;

/// de/dt = -(P/eta) k |e|^gamma sgn(e) + Gamma(t), time in hours.
struct ErrorOdeSpec {
  double e0 = 0.0;
  double k = 8.0;
  double gamma = 0.5;
  double P = 14.0;
  double eta = 2.5;
  Disturbance disturbance;  // empty means Gamma == 0
  /// Step cap as a fraction of the local time scale |e|^(1-gamma) eta / (P k).
  double cap_fraction = 0.01;

  void validate() const;
  double gain() const noexcept { return P / eta * k; }
  double gamma_at(double t_h, double e) const { return disturbance ? disturbance(t_h, e) : 0.0; }
  double rhs(double t_h, double e) const;
};

struct ErrorSample {
  double t_s = 0.0;
  double e = 0.0;
};

/// Explicit Euler with the step capped near e = 0 to resolve the power-law
/// approach. With Gamma == 0 a trajectory that reaches the origin is absorbed there.
std::vector<ErrorSample> simulate_error_ode(const ErrorOdeSpec& spec, double dt_s, double horizon_s);

/// First time (s) the trace reaches or crosses zero, linearly interpolated.
std::optional<double> zero_crossing_time(const std::vector<ErrorSample>& trace);

/// eta |e0|^(1-gamma) / (P k (1-gamma)), in seconds.
double closed_form_settling_time(double e0, double k, double gamma, double P, double eta);

/// Equilibrium |e| under constant Gamma: (eta Gamma / (P k))^(1/gamma).
double steady_residual(double gamma_bar, double k, double gamma, double P, double eta);

/// chi(s) = (eta s / (P C0))^(1/gamma). Throws ConfigError unless 0 < C0 < k.
double ftiss_gain(double s, double C0, double k, double P, double eta, double gamma);

/// max |e| over the final `tail_fraction` of the trace's time span.
double tail_sup(const std::vector<ErrorSample>& trace, double tail_fraction);

struct LyapunovReport {
  std::size_t samples = 0;
  std::size_t checked = 0;     // samples with |e| >= chi(|Gamma|) and e != 0
  std::size_t violations = 0;
  double worst_margin = 0.0;   // max of lhs - rhs over checked samples (<= 0 when clean)
};

/// For V = e^2 / 2, checks DV(e) f(e, Gamma) <= -(P/eta)(k - C0) 2^((1+gamma)/2) V^((1+gamma)/2)
/// at every sample outside the chi(|Gamma|) ball.
LyapunovReport lyapunov_decay_check(const std::vector<ErrorSample>& trace, const ErrorOdeSpec& spec,
                                    double C0, double rel_tol = 1e-9);

void write_trace_csv(std::ostream& out, const std::vector<ErrorSample>& trace);

}  // namespace tclpop::errdyn
