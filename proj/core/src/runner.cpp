#include "tclpop/runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tclpop/density.hpp"
#include "tclpop/errors.hpp"

namespace tclpop {

namespace {

constexpr double kHour = 3600.0;

std::size_t steps_in(double span_s, double dt_s) {
  return static_cast<std::size_t>(std::llround(span_s / dt_s));
}

PopulationConfig episode_population(const Scenario& s, std::size_t episode) {
  PopulationConfig cfg = s.population;
  cfg.seed = episode_seed(s.base_seed, episode);
  return cfg;
}

// Substeps so that every PDE step stays below the stability bound with some slack.
std::size_t substeps(const pde::PdfFields& f, const pde::DriftFields& drift, double u,
                     double span_s, double cfl) {
  const double limit = 0.9 * pde::max_stable_dt(f, drift, u, cfl);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span_s / limit)));
}

}  // namespace

std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t episode_index) noexcept {
  return base_seed ^ static_cast<std::uint64_t>(episode_index);
}

double rmse_percent(std::span<const double> errors) {
  if (errors.empty()) return 0.0;
  double sum = 0.0;
  for (double e : errors) sum += e * e;
  return 100.0 * std::sqrt(sum / static_cast<double>(errors.size()));
}

double rmse_percent(std::span<const TelemetryRow> rows) {
  std::vector<double> errors;
  errors.reserve(rows.size());
  for (const auto& r : rows) errors.push_back(r.e);
  return rmse_percent(errors);
}

MeanStd mean_and_sample_std(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

EpisodeResult run_episode(const Scenario& scenario, std::size_t episode_index) {
  scenario.validate();
  EpisodeResult result;
  result.episode = episode_index;
  result.seed = episode_seed(scenario.base_seed, episode_index);

  Population pop = sample_population(episode_population(scenario, episode_index));
  init_states(pop, scenario.x_sp0, scenario.delta0, scenario.on_fraction);

  const ControllerConfig& ctl = scenario.controller;
  const std::size_t total = steps_in(scenario.horizon, scenario.dt);
  const std::size_t per_tick = steps_in(ctl.t_ci, scenario.dt);
  result.telemetry.reserve(scenario.active_ticks());

  ControllerState state;
  for (std::size_t n = 0; n < total; ++n) {
    const double t = static_cast<double>(n) * scenario.dt;
    if (n % per_tick == 0 && t >= ctl.activation_time) {
      ControllerInput in;
      in.y_norm = measured_output(pop);
      in.y_d_norm = scenario.reference.value(t);
      in.y_d_dot_norm = scenario.reference.rate(t);
      in.densities = estimate_boundary_densities(pop, scenario.density_bin);
      state = tick(state, ctl, in, t);
      const auto& c = pop.conditions();
      result.telemetry.push_back({t, in.y_norm, aggregate_power(pop).y_total_norm, in.y_d_norm,
                                  state.e, state.u, in.densities.f0_lower, in.densities.f1_upper,
                                  pop.count_on(), c.x_sp});
    }
    pop.step(scenario.dt, scenario.ambient.value(t), state.u, scenario.threads);
  }
  if (result.telemetry.size() != scenario.active_ticks())
    throw IntegrityError("run_episode: telemetry row count does not match the active window");
  result.rmse_percent = rmse_percent(std::span<const TelemetryRow>(result.telemetry));
  return result;
}

CampaignResult run_campaign(const Scenario& scenario, bool keep_telemetry) {
  scenario.validate();
  CampaignResult out;
  std::vector<double> rmses;
  for (std::size_t i = 0; i < scenario.episodes; ++i) {
    EpisodeResult ep = run_episode(scenario, i);
    if (!keep_telemetry) ep.telemetry = {};
    rmses.push_back(ep.rmse_percent);
    out.episodes.push_back(std::move(ep));
  }
  const MeanStd ms = mean_and_sample_std(rmses);
  out.mean_rmse = ms.mean;
  out.std_rmse = ms.std;
  return out;
}

void write_telemetry_csv(std::ostream& out, std::span<const TelemetryRow> rows) {
  out << "t_s,y_norm,y_total_norm,y_d_norm,e,u_degC_per_h,f0_lower,f1_upper,n_on,x_sp\n";
  for (const auto& r : rows)
    fmt::print(out, "{:.1f},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{},{:.9g}\n", r.t_s,
               r.y_norm, r.y_total_norm, r.y_d_norm, r.e, r.u, r.f0_lower, r.f1_upper, r.n_on,
               r.x_sp);
}

void write_campaign_csv(std::ostream& out, const CampaignResult& result) {
  out << "episode,seed,rmse_percent\n";
  for (const auto& ep : result.episodes)
    fmt::print(out, "{},{},{:.6f}\n", ep.episode + 1, ep.seed, ep.rmse_percent);
  fmt::print(out, "mean,,{:.6f}\n", result.mean_rmse);
  fmt::print(out, "std,,{:.6f}\n", result.std_rmse);
}

void write_summary(std::ostream& out, const CampaignResult& result, const Scenario& scenario) {
  out << "mean_rmse,std_rmse,episodes,n_units,k,gamma,seed\n";
  fmt::print(out, "{:.6f},{:.6f},{},{},{:g},{:g},{}\n", result.mean_rmse, result.std_rmse,
             result.episodes.size(), scenario.population.n_units, scenario.controller.k,
             scenario.controller.gamma, scenario.base_seed);
}

PdeRunConfig PdeRunConfig::from(const Scenario& s) {
  PdeRunConfig cfg;
  cfg.pde.R = s.population.mean_R;
  cfg.pde.C = s.population.mean_C;
  cfg.pde.P = s.population.P;
  cfg.pde.eta = s.population.eta;
  cfg.pde.sigma = s.population.sigma_w;
  cfg.pde.lambda = s.population.p_f;
  cfg.pde.x_L = s.population.x_L;
  cfg.pde.x_H = s.population.x_H;
  cfg.pde.delta0 = s.delta0;
  cfg.controller = s.controller;
  cfg.reference = s.reference;
  cfg.ambient = s.ambient;
  cfg.x_sp0 = s.x_sp0;
  cfg.on_mass = s.on_fraction;
  cfg.horizon = s.horizon;
  return cfg;
}

PdeRunReport run_pde(const PdeRunConfig& cfg) {
  cfg.pde.validate();
  cfg.controller.validate();
  if (!(cfg.horizon > 0.0)) throw ConfigError("run_pde: horizon must be positive");
  if (!(cfg.on_mass >= 0.0 && cfg.on_mass <= 1.0))
    throw ConfigError("run_pde: on_mass must lie in [0, 1]");

  const pde::CouplingLaw coupling{cfg.pde.lambda};
  pde::PdfFields fields =
      pde::PdfFields::uniform_deadband(cfg.pde, cfg.x_sp0, 1.0 - cfg.on_mass, cfg.on_mass);
  const double mass0 = fields.total_mass();

  PdeRunReport report;
  report.min_density = fields.min_density();
  report.min_boundary_sum = std::numeric_limits<double>::infinity();

  const double t_ci = cfg.controller.t_ci;
  const std::size_t ticks = static_cast<std::size_t>(std::ceil(cfg.horizon / t_ci - 1e-9));
  ControllerState state;
  for (std::size_t j = 0; j < ticks; ++j) {
    const double t = static_cast<double>(j) * t_ci;
    const double span = std::min(t_ci, cfg.horizon - t);
    const auto out = pde::aggregate_outputs(fields);
    const double x_a = cfg.ambient.value(t);
    const pde::DriftFields drift0 = pde::DriftFields::from(cfg.pde, x_a);

    PdeTick row;
    row.t_s = t;
    row.y_norm = out.y_norm;
    row.y_total_norm = out.y_total_norm;
    row.mass = fields.total_mass();
    row.gamma = pde::gamma_disturbance(fields, drift0, coupling, cfg.pde.eta);
    if (cfg.closed_loop) {
      ControllerInput in;
      in.y_norm = out.y_norm;
      in.y_d_norm = cfg.reference.value(std::min(t, cfg.reference.t_end()));
      in.y_d_dot_norm = cfg.reference.rate(std::min(t, cfg.reference.t_end()));
      in.densities = fields.boundary_densities();
      state = tick(state, cfg.controller, in, t);
      row.y_d_norm = in.y_d_norm;
    }
    row.u = cfg.closed_loop ? state.u : 0.0;
    if (t > cfg.controller.activation_time)
      report.min_boundary_sum =
          std::min(report.min_boundary_sum, fields.f0_at_lower() + fields.f1_at_upper());
    report.ticks.push_back(row);

    const std::size_t n_sub = substeps(fields, drift0, row.u, span, cfg.pde.cfl);
    const double dt = span / static_cast<double>(n_sub);
    for (std::size_t k = 0; k < n_sub; ++k) {
      const double ts = t + static_cast<double>(k) * dt;
      const pde::DriftFields drift = pde::DriftFields::from(cfg.pde, cfg.ambient.value(ts));
      const double before = fields.total_mass();
      fields = pde::step(fields, drift, coupling, row.u, dt, cfg.pde.cfl);
      const double after = fields.total_mass();
      report.max_step_deviation = std::max(report.max_step_deviation, std::abs(after - before));
      report.max_mass_deviation = std::max(report.max_mass_deviation, std::abs(after - mass0));
      report.min_density = std::min(report.min_density, fields.min_density());
      ++report.steps;
    }
  }
  if (!std::isfinite(report.min_boundary_sum)) report.min_boundary_sum = 0.0;
  report.final_fields = fields;
  return report;
}

void write_pde_ticks_csv(std::ostream& out, std::span<const PdeTick> ticks) {
  out << "t_s,y_norm,y_total_norm,y_d_norm,u_degC_per_h,gamma,mass\n";
  for (const auto& r : ticks)
    fmt::print(out, "{:.1f},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.15g}\n", r.t_s, r.y_norm,
               r.y_total_norm, r.y_d_norm, r.u, r.gamma, r.mass);
}

CompareReport compare_mc_pde(const CompareConfig& cfg) {
  const Scenario& s = cfg.scenario;
  s.validate();
  if (!(cfg.hours > 0.0 && cfg.sample_every > 0.0))
    throw ConfigError("compare: hours and sample_every must be positive");

  Population pop = sample_population(episode_population(s, 0));
  init_states(pop, s.x_sp0, s.delta0, s.on_fraction);

  PdeRunConfig pcfg = PdeRunConfig::from(s);
  pcfg.pde.cells = cfg.cells;
  const pde::CouplingLaw coupling{pcfg.pde.lambda};
  const pde::DriftFields drift = pde::DriftFields::from(pcfg.pde, cfg.x_a);
  pde::PdfFields fields =
      pde::PdfFields::uniform_deadband(pcfg.pde, s.x_sp0, 1.0 - s.on_fraction, s.on_fraction);

  CompareReport report;
  const std::size_t samples = steps_in(cfg.hours * kHour, cfg.sample_every);
  const std::size_t mc_steps = steps_in(cfg.sample_every, s.dt);
  for (std::size_t j = 0; j <= samples; ++j) {
    CompareSample row{static_cast<double>(j) * cfg.sample_every,
                      aggregate_power(pop).y_total_norm,
                      pde::aggregate_outputs(fields).y_total_norm};
    report.sup_diff = std::max(report.sup_diff, std::abs(row.y_mc - row.y_pde));
    report.samples.push_back(row);
    if (j == samples) break;
    for (std::size_t n = 0; n < mc_steps; ++n) pop.step(s.dt, cfg.x_a, cfg.u, s.threads);
    const std::size_t n_sub = substeps(fields, drift, cfg.u, cfg.sample_every, pcfg.pde.cfl);
    const double dt = cfg.sample_every / static_cast<double>(n_sub);
    for (std::size_t k = 0; k < n_sub; ++k)
      fields = pde::step(fields, drift, coupling, cfg.u, dt, pcfg.pde.cfl);
  }
  return report;
}

void write_compare_csv(std::ostream& out, const CompareReport& report) {
  out << "t_s,y_mc,y_pde,abs_diff\n";
  for (const auto& r : report.samples)
    fmt::print(out, "{:.1f},{:.9g},{:.9g},{:.9g}\n", r.t_s, r.y_mc, r.y_pde,
               std::abs(r.y_mc - r.y_pde));
}

std::vector<SettlingRow> settling_sweep(double k, double P, double eta,
                                        std::span<const double> gammas,
                                        std::span<const double> e0s) {
  std::vector<SettlingRow> rows;
  for (double g : gammas) {
    for (double e0 : e0s) {
      errdyn::ErrorOdeSpec spec;
      spec.e0 = e0;
      spec.k = k;
      spec.gamma = g;
      spec.P = P;
      spec.eta = eta;
      const double T = errdyn::closed_form_settling_time(e0, k, g, P, eta);
      const auto trace = errdyn::simulate_error_ode(spec, 1.0, 2.0 * T + 1.0);
      const auto crossing = errdyn::zero_crossing_time(trace);
      SettlingRow row{g, e0, T, crossing.value_or(std::numeric_limits<double>::infinity()), 0.0};
      row.rel_error = std::abs(row.t_numeric_s - T) / T;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<FtissRow> ftiss_sweep(double k, double gamma, double P, double eta, double e0,
                                  std::span<const double> levels) {
  const double C0 = 0.5 * k;
  const double horizon = std::max(60.0, 5.0 * errdyn::closed_form_settling_time(e0, k, gamma, P, eta));
  std::vector<FtissRow> rows;
  for (double level : levels) {
    const double d = level * P / eta * k * std::pow(std::abs(e0), gamma);
    errdyn::ErrorOdeSpec spec;
    spec.e0 = e0;
    spec.k = k;
    spec.gamma = gamma;
    spec.P = P;
    spec.eta = eta;
    spec.disturbance = [d](double, double) { return d; };
    const auto trace = errdyn::simulate_error_ode(spec, 1.0, horizon);
    FtissRow row;
    row.disturbance = d;
    row.chi = errdyn::ftiss_gain(std::abs(d), C0, k, P, eta, gamma);
    row.tail_sup = errdyn::tail_sup(trace, 0.2);
    row.ratio = row.chi > 0.0 ? row.tail_sup / row.chi : 0.0;
    rows.push_back(row);
  }
  return rows;
}

void write_settling_csv(std::ostream& out, std::span<const SettlingRow> rows) {
  out << "gamma,e0,t_closed_s,t_numeric_s,rel_error\n";
  for (const auto& r : rows)
    fmt::print(out, "{:g},{:g},{:.9g},{:.9g},{:.6g}\n", r.gamma, r.e0, r.t_closed_s,
               r.t_numeric_s, r.rel_error);
}

void write_ftiss_csv(std::ostream& out, std::span<const FtissRow> rows) {
  out << "disturbance,chi,tail_sup,ratio\n";
  for (const auto& r : rows)
    fmt::print(out, "{:g},{:.9g},{:.9g},{:.6g}\n", r.disturbance, r.chi, r.tail_sup, r.ratio);
}

}  // namespace tclpop
