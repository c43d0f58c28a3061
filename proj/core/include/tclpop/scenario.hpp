#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tclpop/controller.hpp"
#include "tclpop/population.hpp"
#include "tclpop/reference.hpp"

namespace tclpop {

/// Piecewise-linear ambient temperature over (t_s, degC) nodes, held flat outside.
class AmbientProfile {
public:
  explicit AmbientProfile(std::vector<std::pair<double, double>> nodes);

  /// 30 degC, ramp down to 23 degC over 11:30-12:30, hold, ramp back to 30 degC over 14:30-15:30.
  static AmbientProfile tracking_campaign();

  const std::vector<std::pair<double, double>>& nodes() const noexcept { return nodes_; }
  double t_begin() const noexcept { return nodes_.front().first; }
  double t_end() const noexcept { return nodes_.back().first; }
  double value(double t) const noexcept;

private:
  std::vector<std::pair<double, double>> nodes_;
};

struct Scenario {
  PopulationConfig population;
  ControllerConfig controller;
  ReferenceProfile reference = ReferenceProfile::tracking_campaign();
  AmbientProfile ambient = AmbientProfile::tracking_campaign();
  double x_sp0 = 20.0;
  double delta0 = 0.5;
  double on_fraction = 0.4;
  double dt = 1.0;            // s
  double horizon = 23400.0;   // s
  double density_bin = 0.008; // degC
  std::size_t episodes = 10;
  std::uint64_t base_seed = 1;
  unsigned threads = 1;

  /// Table-1 population, k = 8, gamma = 0.5, 10 episodes of N = 1000.
  static Scenario table1();

  /// Throws ConfigError on inconsistent settings.
  void validate() const;

  /// Number of controller ticks inside the active window.
  std::size_t active_ticks() const noexcept;
};

/// Reads an INI file; missing keys keep their Table-1 defaults, unknown keys are rejected.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text);

/// "t0:t1:const:level; t0:t1:ramp:from:to; ..."
std::vector<ReferenceSegment> parse_reference_segments(const std::string& text);
/// "t:value, t:value, ..."
std::vector<std::pair<double, double>> parse_ambient_nodes(const std::string& text);

}  // namespace tclpop
