#include "tclpop/controller.hpp"

#include <algorithm>
#include <cmath>

#include "tclpop/errors.hpp"

namespace tclpop {

void ControllerConfig::validate() const {
  if (!(k > 0.0)) throw ConfigError("controller: k must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("controller: gamma must lie in (0, 1)");
  if (!(t_ci > 0.0)) throw ConfigError("controller: t_ci must be positive");
  if (!(eps_denominator > 0.0)) throw ConfigError("controller: eps_denominator must be positive");
  if (!(u_max > 0.0)) throw ConfigError("controller: u_max must be positive");
  if (!(P > 0.0 && eta > 0.0)) throw ConfigError("controller: P and eta must be positive");
  if (!(activation_time >= 0.0)) throw ConfigError("controller: activation_time must be >= 0");
}

ControlOutput control_law(double e, double phi_value, const BoundaryDensities& dens,
                          const ControllerConfig& cfg) noexcept {
  ControlOutput out;
  const double f_sum = dens.sum();
  out.denominator = 2.0 * (std::isfinite(f_sum) ? f_sum : 0.0);
  double denom = out.denominator;
  if (!(denom >= cfg.eps_denominator)) {
    denom = cfg.eps_denominator;
    out.guarded = true;
  }
  const double numerator = cfg.k * std::pow(std::abs(e), cfg.gamma) * signum(e) + phi_value;
  const double raw = numerator / denom;
  if (!std::isfinite(raw)) {
    out.u = std::isnan(raw) ? 0.0 : std::copysign(cfg.u_max, raw);
    out.saturated = !std::isnan(raw);
    return out;
  }
  out.u = std::clamp(raw, -cfg.u_max, cfg.u_max);
  out.saturated = out.u != raw;
  return out;
}

ControllerState tick(const ControllerState& prev, const ControllerConfig& cfg,
                     const ControllerInput& in, double t) {
  ControllerState next = prev;
  next.t = t;
  next.e = compute_error(in.y_norm, in.y_d_norm);
  next.f_meas = in.densities;
  next.active = t >= cfg.activation_time;
  if (!next.active) {
    next.phi = 0.0;
    next.u = 0.0;
    next.guarded = false;
    return next;
  }
  next.phi = phi(cfg.P / cfg.eta * in.y_d_dot_norm, cfg.P, cfg.eta);
  const ControlOutput out = control_law(next.e, next.phi, in.densities, cfg);
  next.u = out.u;
  next.guarded = out.guarded;
  return next;
}

}  // namespace tclpop
