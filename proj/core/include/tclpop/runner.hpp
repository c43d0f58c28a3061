#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "tclpop/errdyn.hpp"
#include "tclpop/pde.hpp"
#include "tclpop/scenario.hpp"

namespace tclpop {

/// One controller tick of telemetry.
struct TelemetryRow {
  double t_s = 0.0;
  double y_norm = 0.0;
  double y_total_norm = 0.0;
  double y_d_norm = 0.0;
  double e = 0.0;
  double u = 0.0;  // degC/h
  double f0_lower = 0.0;
  double f1_upper = 0.0;
  std::size_t n_on = 0;
  double x_sp = 0.0;
};

struct EpisodeResult {
  std::size_t episode = 0;
  std::uint64_t seed = 0;
  double rmse_percent = 0.0;
  std::vector<TelemetryRow> telemetry;  // active window only
};

std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t episode_index) noexcept;

/// 100 sqrt(mean e^2).
double rmse_percent(std::span<const double> errors);
double rmse_percent(std::span<const TelemetryRow> rows);

/// Open-loop warm-up, then closed-loop tracking until the horizon.
EpisodeResult run_episode(const Scenario& scenario, std::size_t episode_index);

struct CampaignResult {
  std::vector<EpisodeResult> episodes;  // telemetry dropped unless requested
  double mean_rmse = 0.0;
  double std_rmse = 0.0;  // sample standard deviation, 0 for one episode
};

CampaignResult run_campaign(const Scenario& scenario, bool keep_telemetry = false);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};
MeanStd mean_and_sample_std(std::span<const double> values);

void write_telemetry_csv(std::ostream& out, std::span<const TelemetryRow> rows);
void write_campaign_csv(std::ostream& out, const CampaignResult& result);
/// Header plus one line: mean_rmse,std_rmse,episodes,n_units,k,gamma,seed.
void write_summary(std::ostream& out, const CampaignResult& result, const Scenario& scenario);

/// Solver-only run of the density model driven by the same controller.
struct PdeRunConfig {
  pde::PdeConfig pde;
  ControllerConfig controller;
  ReferenceProfile reference = ReferenceProfile::tracking_campaign();
  AmbientProfile ambient = AmbientProfile::tracking_campaign();
  double x_sp0 = 20.0;
  double on_mass = 0.4;
  double horizon = 23400.0;
  bool closed_loop = true;

  static PdeRunConfig from(const Scenario& scenario);
};

struct PdeTick {
  double t_s = 0.0;
  double y_norm = 0.0;
  double y_total_norm = 0.0;
  double y_d_norm = 0.0;
  double u = 0.0;
  double gamma = 0.0;  // Gamma in per-unit power per hour
  double mass = 0.0;
};

struct PdeRunReport {
  std::vector<PdeTick> ticks;
  std::size_t steps = 0;
  double max_mass_deviation = 0.0;
  double max_step_deviation = 0.0;
  double min_density = 0.0;
  double min_boundary_sum = 0.0;  // min f0(lower) + f1(upper) after warm-up
  pde::PdfFields final_fields;
};

PdeRunReport run_pde(const PdeRunConfig& cfg);

void write_pde_ticks_csv(std::ostream& out, std::span<const PdeTick> ticks);

/// Open-loop agent and density models from matched initial data.
struct CompareConfig {
  Scenario scenario;  // population, initial split and sampling grid
  double x_a = 30.0;
  double u = 0.0;
  double hours = 2.0;
  double sample_every = 30.0;  // s
  std::size_t cells = 200;
};

struct CompareSample {
  double t_s = 0.0;
  double y_mc = 0.0;
  double y_pde = 0.0;
};

struct CompareReport {
  std::vector<CompareSample> samples;
  double sup_diff = 0.0;
};

CompareReport compare_mc_pde(const CompareConfig& cfg);

void write_compare_csv(std::ostream& out, const CompareReport& report);

/// Numerical against closed-form settling times of the nominal error dynamics.
struct SettlingRow {
  double gamma = 0.0;
  double e0 = 0.0;
  double t_closed_s = 0.0;
  double t_numeric_s = 0.0;
  double rel_error = 0.0;
};

std::vector<SettlingRow> settling_sweep(double k, double P, double eta,
                                        std::span<const double> gammas,
                                        std::span<const double> e0s);

/// Ultimate bound under constant disturbances, C0 = k / 2. Each level s gives
/// Gamma = s (P/eta) k |e0|^gamma, i.e. a fraction of the restoring rate at e0.
struct FtissRow {
  double disturbance = 0.0;
  double chi = 0.0;
  double tail_sup = 0.0;
  double ratio = 0.0;  // tail_sup / chi
};

std::vector<FtissRow> ftiss_sweep(double k, double gamma, double P, double eta, double e0,
                                  std::span<const double> levels);

void write_settling_csv(std::ostream& out, std::span<const SettlingRow> rows);
void write_ftiss_csv(std::ostream& out, std::span<const FtissRow> rows);

}  // namespace tclpop
