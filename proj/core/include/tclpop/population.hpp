#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tclpop {

/// Physical parameters of one air-conditioning load (first-order ETP model).
struct TclParams {
  double R = 2.0;     // thermal resistance, degC/kW
  double C = 10.0;    // thermal capacitance, kWh/degC
  double P = 14.0;    // electric power, kW
  double eta = 2.5;   // load efficiency
};

enum class Mode : std::uint8_t { kOff = 0, kOn = 1 };

struct TclState {
  double x = 20.0;               // indoor temperature, degC
  Mode mode = Mode::kOff;
  double lock_remaining = 0.0;   // seconds until forced switching is permitted
};

struct TclUnit {
  TclParams params;
  TclState state;
};

/// Shared operating conditions broadcast to every unit.
struct OperatingConditions {
  double x_sp = 20.0;    // set-point, degC
  double delta0 = 0.5;   // deadband width, degC
  double x_a = 30.0;     // ambient temperature, degC
  double u = 0.0;        // set-point variation rate, degC/h

  double lower() const noexcept { return x_sp - 0.5 * delta0; }
  double upper() const noexcept { return x_sp + 0.5 * delta0; }
};

/// Population-wide settings. Defaults follow the Table-1 air-conditioner population.
struct PopulationConfig {
  std::size_t n_units = 1000;
  double mean_R = 2.0;
  double mean_C = 10.0;
  double sigma_p = 0.2;
  double P = 14.0;
  double eta = 2.5;
  double sigma_w = 0.01;          // degC / sqrt(h)
  double p_f = 0.03;              // forced switches per unit per hour
  double t_lock = 360.0;          // s
  double safe_border_frac = 0.05;
  double x_L = 15.0;
  double x_H = 25.0;
  std::uint64_t seed = 1;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Per-step thermostat settings shared by all units.
struct ThermostatSettings {
  double sigma_w = 0.01;
  double t_lock = 360.0;
  double safe_border_frac = 0.05;
  double x_L = 15.0;
  double x_H = 25.0;

  static ThermostatSettings from(const PopulationConfig& cfg) noexcept;
};

/// Result of advancing one unit by one step.
struct UnitStepResult {
  TclState state;
  bool forced_toggle = false;
};

/// Euler-Maruyama update of the ETP model followed by the hybrid deadband rule.
///
/// Thermostat switches at the deadband edges always act and override the
/// lockout; lockout and the safe border only veto forced toggles.
UnitStepResult step_unit(const TclUnit& unit, double dt_s, const OperatingConditions& cond,
                         const ThermostatSettings& thermostat, double noise, bool forced) noexcept;

/// Counts collected while stepping; everything the density and controller modules need
/// can be recomputed from the population itself, these are step-local diagnostics.
struct Measurements {
  std::size_t n_on = 0;
  std::size_t forced_requests = 0;
  std::size_t forced_toggles = 0;
  std::size_t boundary_switches = 0;
};

struct PowerReading {
  double y_total_kw = 0.0;
  double y_total_norm = 0.0;
};

/// A heterogeneous TCL population together with its shared operating conditions.
class Population {
public:
  Population(PopulationConfig config, std::vector<TclUnit> units);

  const PopulationConfig& config() const noexcept { return config_; }
  std::span<const TclUnit> units() const noexcept { return units_; }
  std::span<TclUnit> units() noexcept { return units_; }
  std::size_t size() const noexcept { return units_.size(); }

  const OperatingConditions& conditions() const noexcept { return cond_; }
  void set_conditions(const OperatingConditions& cond) noexcept { cond_ = cond; }

  std::uint64_t step_index() const noexcept { return step_index_; }
  void reset_step_index() noexcept { step_index_ = 0; }

  /// Advance every unit by dt_s under ambient x_a and broadcast rate u.
  ///
  /// The set-point moves first (x_sp += u * dt), then units are stepped
  /// against the moved deadband. Each unit draws from its own Philox stream
  /// keyed by (seed, unit, step), so the result does not depend on `threads`.
  Measurements step(double dt_s, double x_a, double u, unsigned threads = 1);

  /// Number of units currently ON.
  std::size_t count_on() const noexcept;

private:
  PopulationConfig config_;
  std::vector<TclUnit> units_;
  OperatingConditions cond_;
  std::uint64_t step_index_ = 0;
};

/// Draw heterogeneous parameters: R_i = mean_R * exp(sigma_p z - sigma_p^2 / 2), likewise C_i.
Population sample_population(const PopulationConfig& config);

/// Uniform temperatures over the deadband around x_sp0 and exactly
/// round(on_fraction * N) ON units chosen at random. Resets lockouts and the step counter.
void init_states(Population& pop, double x_sp0, double delta0, double on_fraction);

/// y_total = (P/eta) * #(ON with x >= lower edge); normalised by N * P / eta.
PowerReading aggregate_power(const Population& pop) noexcept;

/// Normalised tracking output: y_total plus ON mass above the upper edge minus
/// OFF mass below the lower edge.
double measured_output(const Population& pop) noexcept;

/// Split [0, n) into contiguous chunks and run fn(begin, end) on up to `threads` threads.
template <class Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn);

}  // namespace tclpop

#include "tclpop/detail/parallel.hpp"
