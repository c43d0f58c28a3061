// tclsim: command-line front end for tracking campaigns, density-model runs and
// error-dynamics studies.

#include <array>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "tclpop/errors.hpp"
#include "tclpop/runner.hpp"
#include "tclpop/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kCheckFailed = 2;

struct Overrides {
  std::string config;
  std::optional<std::size_t> n_units;
  std::optional<std::size_t> episodes;
  std::optional<std::uint64_t> seed;
  std::optional<double> k;
  std::optional<double> gamma;
  std::optional<double> density_bin;
  std::optional<unsigned> threads;

  tclpop::Scenario scenario() const {
    tclpop::Scenario s = config.empty() ? tclpop::Scenario::table1() : tclpop::load_scenario(config);
    if (n_units) s.population.n_units = *n_units;
    if (episodes) s.episodes = *episodes;
    if (seed) s.base_seed = *seed;
    if (k) s.controller.k = *k;
    if (gamma) s.controller.gamma = *gamma;
    if (density_bin) s.density_bin = *density_bin;
    if (threads) s.threads = *threads;
    s.validate();
    return s;
  }
};

void add_scenario_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "Scenario INI file")->check(CLI::ExistingFile);
  cmd->add_option("-n,--n-units", o.n_units, "Population size");
  cmd->add_option("--seed", o.seed, "Base seed");
  cmd->add_option("-k,--k", o.k, "Controller gain");
  cmd->add_option("--gamma", o.gamma, "Controller exponent");
  cmd->add_option("--density-bin", o.density_bin, "Boundary density bin width (degC)");
  cmd->add_option("-j,--threads", o.threads, "Worker threads per population step");
}

/// Writes to the named file, or stdout when the name is empty or "-".
class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw tclpop::ConfigError("cannot open output '" + path + "'");
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

int report_check(bool passed, const std::string& what) {
  std::cerr << (passed ? "check passed: " : "check FAILED: ") << what << '\n';
  return passed ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TCL population simulation and set-point tracking control"};
  app.require_subcommand(1);

  Overrides sim_o;
  std::size_t sim_episode = 0;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "Run one episode and write its telemetry CSV");
  add_scenario_options(sim, sim_o);
  sim->add_option("--episode", sim_episode, "Episode index (seed = base seed XOR index)");
  sim->add_option("-o,--out", sim_out, "Telemetry CSV (default stdout)");

  Overrides camp_o;
  std::string camp_out, camp_summary;
  bool camp_check = false;
  double camp_max_mean = 2.0, camp_max_episode = 3.0;
  auto* camp = app.add_subcommand("campaign", "Run repeated episodes and report RMSE statistics");
  add_scenario_options(camp, camp_o);
  camp->add_option("-e,--episodes", camp_o.episodes, "Number of episodes");
  camp->add_option("-o,--out", camp_out, "Per-episode CSV (default stdout)");
  camp->add_option("--summary", camp_summary, "Summary CSV line");
  camp->add_flag("--check", camp_check, "Exit 2 unless the RMSE bands hold");
  camp->add_option("--max-mean", camp_max_mean, "Mean RMSE bound for --check (%)");
  camp->add_option("--max-episode", camp_max_episode, "Per-episode RMSE bound for --check (%)");

  Overrides pde_o;
  std::optional<double> pde_hours;
  std::size_t pde_cells = 200;
  bool pde_open = false, pde_check = false;
  std::string pde_out, pde_fields;
  auto* pdec = app.add_subcommand("pde", "Run the density model with conservation diagnostics");
  add_scenario_options(pdec, pde_o);
  pdec->add_option("--hours", pde_hours, "Horizon in hours");
  pdec->add_option("--cells", pde_cells, "Cells per segment");
  pdec->add_flag("--open-loop", pde_open, "Hold u = 0");
  pdec->add_option("-o,--out", pde_out, "Per-tick CSV (default stdout)");
  pdec->add_option("--fields", pde_fields, "Final density snapshot CSV");
  pdec->add_flag("--check", pde_check, "Exit 2 unless mass and sign bounds hold");

  Overrides cmp_o;
  double cmp_hours = 2.0;
  std::size_t cmp_cells = 200;
  bool cmp_check = false;
  std::string cmp_out;
  auto* cmp = app.add_subcommand("compare", "Agent model against density model, open loop");
  add_scenario_options(cmp, cmp_o);
  cmp->add_option("--hours", cmp_hours, "Horizon in hours");
  cmp->add_option("--cells", cmp_cells, "Cells per segment");
  cmp->add_option("-o,--out", cmp_out, "Comparison CSV (default stdout)");
  cmp->add_flag("--check", cmp_check, "Exit 2 unless the sup difference is at most 0.05");

  double ed_k = 8.0, ed_P = 14.0, ed_eta = 2.5, ed_e0 = 0.5;
  std::string ed_settling, ed_ftiss;
  bool ed_check = false;
  auto* ed = app.add_subcommand("errdyn", "Settling-time and ultimate-bound sweeps");
  ed->add_option("-k,--k", ed_k, "Gain");
  ed->add_option("--P", ed_P, "Unit power (kW)");
  ed->add_option("--eta", ed_eta, "Efficiency");
  ed->add_option("--e0", ed_e0, "Initial error for the bound sweep");
  ed->add_option("--settling-out", ed_settling, "Settling CSV (default stdout)");
  ed->add_option("--ftiss-out", ed_ftiss, "Bound CSV (default stdout)");
  ed->add_flag("--check", ed_check, "Exit 2 unless every row is within tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*sim) {
      const auto s = sim_o.scenario();
      const auto ep = tclpop::run_episode(s, sim_episode);
      Output out(sim_out);
      tclpop::write_telemetry_csv(out.get(), ep.telemetry);
      std::cerr << fmt::format("episode {} seed {} rmse {:.4f}%\n", sim_episode, ep.seed,
                               ep.rmse_percent);
      return kOk;
    }
    if (*camp) {
      const auto s = camp_o.scenario();
      const auto result = tclpop::run_campaign(s);
      Output out(camp_out);
      tclpop::write_campaign_csv(out.get(), result);
      if (!camp_summary.empty()) {
        Output summary(camp_summary);
        tclpop::write_summary(summary.get(), result, s);
      } else {
        tclpop::write_summary(std::cerr, result, s);
      }
      if (!camp_check) return kOk;
      bool ok = result.mean_rmse <= camp_max_mean;
      for (const auto& ep : result.episodes) ok = ok && ep.rmse_percent <= camp_max_episode;
      return report_check(ok, fmt::format("mean rmse {:.4f}% (<= {}), every episode <= {}%",
                                          result.mean_rmse, camp_max_mean, camp_max_episode));
    }
    if (*pdec) {
      auto cfg = tclpop::PdeRunConfig::from(pde_o.scenario());
      cfg.pde.cells = pde_cells;
      cfg.closed_loop = !pde_open;
      if (pde_hours) cfg.horizon = *pde_hours * 3600.0;
      const auto report = tclpop::run_pde(cfg);
      Output out(pde_out);
      tclpop::write_pde_ticks_csv(out.get(), report.ticks);
      if (!pde_fields.empty()) {
        Output fields(pde_fields);
        tclpop::pde::write_fields_csv(fields.get(), report.final_fields);
      }
      std::cerr << fmt::format(
          "steps {} mass_dev {:.3e} step_dev {:.3e} min_density {:.3e} min_boundary_sum {:.4g}\n",
          report.steps, report.max_mass_deviation, report.max_step_deviation, report.min_density,
          report.min_boundary_sum);
      if (!pde_check) return kOk;
      const bool ok = report.max_mass_deviation <= 1e-6 && report.max_step_deviation <= 1e-12 &&
                      report.min_density >= -1e-10;
      return report_check(ok, "mass deviation <= 1e-6, step deviation <= 1e-12, density >= -1e-10");
    }
    if (*cmp) {
      tclpop::CompareConfig cfg;
      if (!cmp_o.n_units) cmp_o.n_units = 100000;
      cfg.scenario = cmp_o.scenario();
      cfg.hours = cmp_hours;
      cfg.cells = cmp_cells;
      const auto report = tclpop::compare_mc_pde(cfg);
      Output out(cmp_out);
      tclpop::write_compare_csv(out.get(), report);
      std::cerr << fmt::format("sup |y_mc - y_pde| = {:.4f}\n", report.sup_diff);
      if (!cmp_check) return kOk;
      return report_check(report.sup_diff <= 0.05, "sup difference <= 0.05");
    }
    if (*ed) {
      const std::array gammas{0.3, 0.5, 0.7};
      const std::array e0s{1e-3, 0.1, 1.0};
      const std::array levels{-0.5, -0.1, 0.05, 0.2, 0.5};
      const auto settling = tclpop::settling_sweep(ed_k, ed_P, ed_eta, gammas, e0s);
      bool ok = true;
      {
        Output out(ed_settling);
        tclpop::write_settling_csv(out.get(), settling);
      }
      for (const auto& r : settling) ok = ok && r.rel_error <= 0.02;
      Output out(ed_ftiss);
      for (double g : gammas) {
        const auto rows = tclpop::ftiss_sweep(ed_k, g, ed_P, ed_eta, ed_e0, levels);
        out.get() << fmt::format("# gamma = {}\n", g);
        tclpop::write_ftiss_csv(out.get(), rows);
        for (const auto& r : rows) ok = ok && r.ratio <= 1.05;
      }
      if (!ed_check) return kOk;
      return report_check(ok, "settling within 2%, tail within 1.05 chi");
    }
  } catch (const tclpop::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kOk;
}
