#include "tclpop/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "tclpop/errors.hpp"

namespace tclpop {

namespace {

constexpr double kHour = 3600.0;

double to_double(const std::string& token, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", what, token));
  }
}

std::vector<std::string> split_trimmed(const std::string& text, const char* sep) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(sep));
  for (auto& p : parts) boost::trim(p);
  std::erase_if(parts, [](const std::string& p) { return p.empty(); });
  return parts;
}

using Ptree = boost::property_tree::ptree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"population",
       {"n_units", "mean_R", "mean_C", "sigma_p", "P", "eta", "sigma_w", "p_f", "t_lock",
        "safe_border_frac", "x_L", "x_H"}},
      {"controller", {"k", "gamma", "t_ci", "eps_denominator", "u_max", "activation_time"}},
      {"initial", {"x_sp0", "delta0", "on_fraction"}},
      {"run", {"dt", "horizon", "density_bin", "episodes", "base_seed", "threads"}},
      {"reference", {"segments"}},
      {"ambient", {"nodes"}},
  };
  return keys;
}

template <class T>
void read(const Ptree& tree, const char* key, T& target) {
  if (auto v = tree.get_optional<std::string>(key)) {
    boost::trim(*v);
    const double d = to_double(*v, key);
    if constexpr (std::is_integral_v<T>) {
      if (d < 0.0 || d != std::floor(d))
        throw ConfigError(fmt::format("{}: expected a non-negative integer, got '{}'", key, *v));
      target = static_cast<T>(d);
    } else {
      target = d;
    }
  }
}

Scenario from_tree(const Ptree& root) {
  for (const auto& [section, body] : root) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError(fmt::format("unknown section [{}]", section));
    for (const auto& [key, value] : body)
      if (!it->second.contains(key))
        throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, section));
  }

  Scenario s = Scenario::table1();
  const Ptree empty;
  const Ptree& pop = root.get_child("population", empty);
  read(pop, "n_units", s.population.n_units);
  read(pop, "mean_R", s.population.mean_R);
  read(pop, "mean_C", s.population.mean_C);
  read(pop, "sigma_p", s.population.sigma_p);
  read(pop, "P", s.population.P);
  read(pop, "eta", s.population.eta);
  read(pop, "sigma_w", s.population.sigma_w);
  read(pop, "p_f", s.population.p_f);
  read(pop, "t_lock", s.population.t_lock);
  read(pop, "safe_border_frac", s.population.safe_border_frac);
  read(pop, "x_L", s.population.x_L);
  read(pop, "x_H", s.population.x_H);
  s.controller.P = s.population.P;
  s.controller.eta = s.population.eta;

  const Ptree& ctl = root.get_child("controller", empty);
  read(ctl, "k", s.controller.k);
  read(ctl, "gamma", s.controller.gamma);
  read(ctl, "t_ci", s.controller.t_ci);
  read(ctl, "eps_denominator", s.controller.eps_denominator);
  read(ctl, "u_max", s.controller.u_max);
  read(ctl, "activation_time", s.controller.activation_time);

  const Ptree& init = root.get_child("initial", empty);
  read(init, "x_sp0", s.x_sp0);
  read(init, "delta0", s.delta0);
  read(init, "on_fraction", s.on_fraction);

  const Ptree& run = root.get_child("run", empty);
  read(run, "dt", s.dt);
  read(run, "horizon", s.horizon);
  read(run, "density_bin", s.density_bin);
  read(run, "episodes", s.episodes);
  read(run, "base_seed", s.base_seed);
  read(run, "threads", s.threads);

  if (auto seg = root.get_optional<std::string>("reference.segments"))
    s.reference = ReferenceProfile(parse_reference_segments(*seg));
  if (auto nodes = root.get_optional<std::string>("ambient.nodes"))
    s.ambient = AmbientProfile(parse_ambient_nodes(*nodes));

  s.validate();
  return s;
}

}  // namespace

AmbientProfile::AmbientProfile(std::vector<std::pair<double, double>> nodes)
    : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ConfigError("ambient: at least one node required");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i].first) || !std::isfinite(nodes_[i].second))
      throw ConfigError("ambient: non-finite node");
    if (i > 0 && !(nodes_[i].first > nodes_[i - 1].first))
      throw ConfigError("ambient: node times must increase strictly");
  }
}

AmbientProfile AmbientProfile::tracking_campaign() {
  return AmbientProfile({{0.0, 30.0},
                         {1.5 * kHour, 30.0},
                         {2.5 * kHour, 23.0},
                         {4.5 * kHour, 23.0},
                         {5.5 * kHour, 30.0},
                         {6.5 * kHour, 30.0}});
}

double AmbientProfile::value(double t) const noexcept {
  if (t <= nodes_.front().first) return nodes_.front().second;
  if (t >= nodes_.back().first) return nodes_.back().second;
  const auto hi = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                                   [](double v, const auto& n) { return v < n.first; });
  const auto lo = hi - 1;
  const double w = (t - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

Scenario Scenario::table1() { return Scenario{}; }

void Scenario::validate() const {
  population.validate();
  controller.validate();
  if (controller.P != population.P || controller.eta != population.eta)
    throw ConfigError("scenario: controller and population disagree on P or eta");
  if (!(dt > 0.0)) throw ConfigError("scenario: dt must be positive");
  if (!(delta0 > 0.0)) throw ConfigError("scenario: delta0 must be positive");
  if (!(on_fraction >= 0.0 && on_fraction <= 1.0))
    throw ConfigError("scenario: on_fraction must lie in [0, 1]");
  if (!(x_sp0 - 0.5 * delta0 > population.x_L && x_sp0 + 0.5 * delta0 < population.x_H))
    throw ConfigError("scenario: initial deadband must lie inside (x_L, x_H)");
  if (!(density_bin > 0.0 && density_bin < delta0))
    throw ConfigError("scenario: density_bin must lie in (0, delta0)");
  if (!(horizon > controller.activation_time))
    throw ConfigError("scenario: horizon must exceed the warm-up");
  if (episodes < 1) throw ConfigError("scenario: episodes must be >= 1");
  if (threads < 1) throw ConfigError("scenario: threads must be >= 1");
  const double steps_per_tick = controller.t_ci / dt;
  if (std::abs(steps_per_tick - std::round(steps_per_tick)) > 1e-9)
    throw ConfigError("scenario: t_ci must be a multiple of dt");
  if (reference.t_begin() > 0.0 || reference.t_end() < horizon)
    throw ConfigError("scenario: reference must cover [0, horizon]");
  if (ambient.t_begin() > 0.0 || ambient.t_end() < horizon)
    throw ConfigError("scenario: ambient profile must cover [0, horizon]");
}

std::size_t Scenario::active_ticks() const noexcept {
  return static_cast<std::size_t>(
      std::llround((horizon - controller.activation_time) / controller.t_ci));
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

Scenario parse_scenario(const std::string& text) {
  std::istringstream in(text);
  Ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }
  return from_tree(tree);
}

std::vector<ReferenceSegment> parse_reference_segments(const std::string& text) {
  std::vector<ReferenceSegment> out;
  for (const auto& item : split_trimmed(text, ";")) {
    const auto f = split_trimmed(item, ":");
    if (f.size() == 4 && f[2] == "const") {
      out.push_back(ReferenceSegment::constant(to_double(f[0], "reference"),
                                               to_double(f[1], "reference"),
                                               to_double(f[3], "reference")));
    } else if (f.size() == 5 && f[2] == "ramp") {
      out.push_back(ReferenceSegment::transition(
          to_double(f[0], "reference"), to_double(f[1], "reference"),
          to_double(f[3], "reference"), to_double(f[4], "reference")));
    } else {
      throw ConfigError(fmt::format("reference: cannot parse segment '{}'", item));
    }
  }
  if (out.empty()) throw ConfigError("reference: no segments");
  return out;
}

std::vector<std::pair<double, double>> parse_ambient_nodes(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  for (const auto& item : split_trimmed(text, ",")) {
    const auto f = split_trimmed(item, ":");
    if (f.size() != 2) throw ConfigError(fmt::format("ambient: cannot parse node '{}'", item));
    out.emplace_back(to_double(f[0], "ambient"), to_double(f[1], "ambient"));
  }
  return out;
}

}  // namespace tclpop
