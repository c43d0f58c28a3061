#include "tclpop/population.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "tclpop/errors.hpp"
#include "tclpop/rng.hpp"

namespace tclpop {

namespace {

constexpr double kSecondsPerHour = 3600.0;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("population: " + msg);
}

}  // namespace

void PopulationConfig::validate() const {
  require(n_units > 0, "n_units must be positive");
  require(mean_R > 0.0 && mean_C > 0.0, "mean_R and mean_C must be positive");
  require(P > 0.0 && eta > 0.0, "P and eta must be positive");
  require(sigma_p >= 0.0, "sigma_p must be non-negative");
  require(sigma_w >= 0.0, "sigma_w must be non-negative");
  require(p_f >= 0.0, "p_f must be non-negative");
  require(t_lock >= 0.0, "t_lock must be non-negative");
  require(safe_border_frac >= 0.0 && safe_border_frac < 0.5,
          "safe_border_frac must lie in [0, 0.5)");
  require(x_L < x_H, "x_L must be below x_H");
}

ThermostatSettings ThermostatSettings::from(const PopulationConfig& cfg) noexcept {
  return {cfg.sigma_w, cfg.t_lock, cfg.safe_border_frac, cfg.x_L, cfg.x_H};
}

UnitStepResult step_unit(const TclUnit& unit, double dt_s, const OperatingConditions& cond,
                         const ThermostatSettings& thermostat, double noise, bool forced) noexcept {
  const TclParams& p = unit.params;
  const TclState& s = unit.state;
  const double dt_h = dt_s / kSecondsPerHour;
  const double on = s.mode == Mode::kOn ? 1.0 : 0.0;

  double x = s.x + (cond.x_a - s.x - on * p.R * p.P) / (p.C * p.R) * dt_h;
  if (thermostat.sigma_w > 0.0) x += thermostat.sigma_w * std::sqrt(dt_h) * noise;

  // Impenetrable walls at x_L / x_H.
  if (x < thermostat.x_L) x = 2.0 * thermostat.x_L - x;
  if (x > thermostat.x_H) x = 2.0 * thermostat.x_H - x;

  const double lower = cond.lower();
  const double upper = cond.upper();
  const double border = thermostat.safe_border_frac * cond.delta0;

  UnitStepResult out{TclState{x, s.mode, s.lock_remaining}, false};
  if (x >= upper) {
    out.state.mode = Mode::kOn;
  } else if (x <= lower) {
    out.state.mode = Mode::kOff;
  } else if (forced && s.lock_remaining <= 0.0) {
    const bool near_own_edge = (s.mode == Mode::kOn && x >= upper - border) ||
                               (s.mode == Mode::kOff && x <= lower + border);
    if (!near_own_edge) {
      out.state.mode = s.mode == Mode::kOn ? Mode::kOff : Mode::kOn;
      out.forced_toggle = true;
    }
  }

  if (out.state.mode != s.mode) {
    out.state.lock_remaining = thermostat.t_lock;
  } else {
    out.state.lock_remaining = std::max(0.0, s.lock_remaining - dt_s);
  }
  return out;
}

Population::Population(PopulationConfig config, std::vector<TclUnit> units)
    : config_(std::move(config)), units_(std::move(units)) {}

Measurements Population::step(double dt_s, double x_a, double u, unsigned threads) {
  cond_.x_a = x_a;
  cond_.u = u;
  cond_.x_sp += u * dt_s / kSecondsPerHour;

  const ThermostatSettings thermostat = ThermostatSettings::from(config_);
  const double p_forced = config_.p_f * dt_s / kSecondsPerHour;
  const bool draw_noise = config_.sigma_w > 0.0;
  const std::uint64_t seed = config_.seed;
  const std::uint64_t step = step_index_;
  const OperatingConditions cond = cond_;

  std::atomic<std::size_t> n_on{0}, requests{0}, toggles{0}, switches{0};
  parallel_chunks(units_.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::size_t on = 0, req = 0, tog = 0, sw = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto block = random_block(seed, StreamTag::kStep, step, static_cast<std::uint32_t>(i));
      const double noise = draw_noise ? standard_normal(block) : 0.0;
      const bool forced = p_forced > 0.0 && uniform_open32(block[3]) < p_forced;
      TclUnit& unit = units_[i];
      const UnitStepResult r = step_unit(unit, dt_s, cond, thermostat, noise, forced);
      req += forced ? 1 : 0;
      tog += r.forced_toggle ? 1 : 0;
      sw += (r.state.mode != unit.state.mode && !r.forced_toggle) ? 1 : 0;
      unit.state = r.state;
      on += unit.state.mode == Mode::kOn ? 1 : 0;
    }
    n_on += on;
    requests += req;
    toggles += tog;
    switches += sw;
  });
  ++step_index_;
  return {n_on.load(), requests.load(), toggles.load(), switches.load()};
}

std::size_t Population::count_on() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      units_.begin(), units_.end(), [](const TclUnit& u) { return u.state.mode == Mode::kOn; }));
}

Population sample_population(const PopulationConfig& config) {
  config.validate();
  std::vector<TclUnit> units(config.n_units);
  const double sp = config.sigma_p;
  const double bias = -0.5 * sp * sp;
  for (std::size_t i = 0; i < units.size(); ++i) {
    const double zr = standard_normal(random_block(config.seed, StreamTag::kParamR, i, 0));
    const double zc = standard_normal(random_block(config.seed, StreamTag::kParamC, i, 0));
    units[i].params = TclParams{config.mean_R * std::exp(sp * zr + bias),
                                config.mean_C * std::exp(sp * zc + bias), config.P, config.eta};
  }
  return Population(config, std::move(units));
}

void init_states(Population& pop, double x_sp0, double delta0, double on_fraction) {
  if (!(on_fraction >= 0.0 && on_fraction <= 1.0))
    throw ConfigError("init_states: on_fraction must lie in [0, 1]");
  if (!(delta0 > 0.0)) throw ConfigError("init_states: delta0 must be positive");

  OperatingConditions cond = pop.conditions();
  cond.x_sp = x_sp0;
  cond.delta0 = delta0;
  cond.u = 0.0;
  pop.set_conditions(cond);

  const std::uint64_t seed = pop.config().seed;
  auto units = pop.units();
  const std::size_t n = units.size();
  std::vector<std::uint64_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = random_block(seed, StreamTag::kInitTemp, i, 0);
    units[i].state = TclState{cond.lower() + delta0 * uniform_open(t[0], t[1]), Mode::kOff, 0.0};
    const auto m = random_block(seed, StreamTag::kInitMode, i, 0);
    keys[i] = (static_cast<std::uint64_t>(m[0]) << 32) | m[1];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return keys[a] != keys[b] ? keys[a] < keys[b] : a < b;
  });
  const auto n_on = static_cast<std::size_t>(std::llround(on_fraction * static_cast<double>(n)));
  for (std::size_t j = 0; j < n_on; ++j) units[order[j]].state.mode = Mode::kOn;

  pop.reset_step_index();
}

PowerReading aggregate_power(const Population& pop) noexcept {
  const double lower = pop.conditions().lower();
  std::size_t count = 0;
  for (const TclUnit& u : pop.units())
    if (u.state.mode == Mode::kOn && u.state.x >= lower) ++count;
  const auto& cfg = pop.config();
  const double n = static_cast<double>(pop.size());
  return {cfg.P / cfg.eta * static_cast<double>(count), static_cast<double>(count) / n};
}

double measured_output(const Population& pop) noexcept {
  const double lower = pop.conditions().lower();
  const double upper = pop.conditions().upper();
  long long count = 0;
  for (const TclUnit& u : pop.units()) {
    if (u.state.mode == Mode::kOn) {
      if (u.state.x >= lower) ++count;
      if (u.state.x > upper) ++count;
    } else if (u.state.x < lower) {
      --count;
    }
  }
  return static_cast<double>(count) / static_cast<double>(pop.size());
}

}  // namespace tclpop
