#pragma once

#include "tclpop/density.hpp"

namespace tclpop {

struct ControllerConfig {
  double k = 8.0;                 // gain on the normalised error
  double gamma = 0.5;             // exponent in (0, 1)
  double t_ci = 30.0;             // control interval, s
  double eps_denominator = 0.05;  // smallest admissible 2 (f1 + f0), 1/degC
  double u_max = 10.0;            // rate saturation, degC/h
  double P = 14.0;
  double eta = 2.5;
  double activation_time = 1800.0;  // open-loop warm-up, s

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Three-valued sign: -1, 0, +1.
constexpr double signum(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// e = y - y_d.
constexpr double compute_error(double y_norm, double y_d_norm) noexcept { return y_norm - y_d_norm; }

/// Feed-forward term -(eta / P) * dy_d/dt, with dy_d/dt in per-unit power (kW/h).
constexpr double phi(double y_d_dot_power, double P, double eta) noexcept {
  return -(eta / P) * y_d_dot_power;
}

struct ControlOutput {
  double u = 0.0;             // degC/h
  double denominator = 0.0;   // 2 (f1 + f0) before guarding
  bool guarded = false;       // denominator fell below eps_denominator
  bool saturated = false;
};

/// u = (k |e|^gamma sgn(e) + phi) / max(2 (f1 + f0), eps), clamped to [-u_max, u_max].
ControlOutput control_law(double e, double phi_value, const BoundaryDensities& dens,
                          const ControllerConfig& cfg) noexcept;

/// Everything the controller reads at a tick.
struct ControllerInput {
  double y_norm = 0.0;
  double y_d_norm = 0.0;
  double y_d_dot_norm = 0.0;  // 1/h
  BoundaryDensities densities;
};

struct ControllerState {
  double t = 0.0;
  double e = 0.0;
  double phi = 0.0;
  double u = 0.0;
  BoundaryDensities f_meas;
  bool active = false;
  bool guarded = false;
};

/// One zero-order-hold update. Before cfg.activation_time the loop is open and u = 0.
///
/// The error channel is normalised by P / eta, so the reference derivative is
/// converted back to per-unit power before forming phi; this makes the
/// feed-forward cancel dy_d/dt exactly in normalised units.
ControllerState tick(const ControllerState& prev, const ControllerConfig& cfg,
                     const ControllerInput& in, double t);

}  // namespace tclpop
