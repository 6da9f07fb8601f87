#include "irlab/gain_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace irlab {

std::string_view to_string(GainMode m) {
  return m == GainMode::deterministic ? "deterministic" : "stochastic";
}

GainMode gain_mode_from_string(std::string_view text) {
  if (text == "deterministic") return GainMode::deterministic;
  if (text == "stochastic") return GainMode::stochastic;
  throw std::invalid_argument("unknown gain mode '" + std::string(text) +
                              "' (expected deterministic or stochastic)");
}

namespace {

constexpr std::int64_t kMaxSimulatedSteps = 10'000'000;

GainTrajectory simulate_one(Strategy s, const GainModel& g, const CostModel& c,
                            const SimConfig& cfg) {
  GainTrajectory out;
  out.strategy = s;
  out.mode = cfg.mode;
  out.seed = cfg.seed;

  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                    static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(s == Strategy::global ? 0 : 1)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double failure_rate = s == Strategy::global ? cfg.failure_rate_global
                                                    : cfg.failure_rate_local;

  double cumulative = 0.0;
  double tokens = c.c0();
  for (std::int64_t t = 1;; ++t) {
    if (cfg.horizon.iterations && t > *cfg.horizon.iterations) {
      break;
    }
    const double next_tokens = tokens + step_cost(s, t, c);
    if (cfg.horizon.budget && next_tokens > *cfg.horizon.budget) {
      break;
    }
    if (t > kMaxSimulatedSteps) {
      throw std::domain_error("simulate: horizon exceeds 1e7 steps");
    }

    const bool failed = unit(rng) < failure_rate;
    double gain = 0.0;
    if (!failed) {
      if (s == Strategy::global) {
        const double bound = g.alpha() * std::pow(g.gamma(), static_cast<double>(t));
        gain = cfg.mode == GainMode::deterministic ? bound : bound * unit(rng);
      } else {
        gain = cfg.mode == GainMode::deterministic ? g.beta()
                                                   : g.beta() * (1.0 + 0.5 * unit(rng));
      }
      if (cfg.loss_floor) {
        gain = std::min(gain, std::max(0.0, *cfg.loss_floor - cumulative));
      }
    }
    cumulative += gain;
    tokens = next_tokens;
    out.gains.push_back(gain);
    out.cumulative.push_back(cumulative);
    out.token_costs.push_back(tokens);
    out.failed.push_back(failed);
  }
  return out;
}

}  // namespace

std::pair<GainTrajectory, GainTrajectory> simulate(const GainModel& g, const CostModel& c,
                                                   const SimConfig& cfg) {
  const bool by_steps = cfg.horizon.iterations.has_value();
  const bool by_budget = cfg.horizon.budget.has_value();
  if (by_steps == by_budget) {
    throw std::invalid_argument("simulate: give exactly one of an iteration or a budget horizon");
  }
  if (by_steps && *cfg.horizon.iterations < 1) {
    throw std::invalid_argument("simulate: iteration horizon must be >= 1");
  }
  if (by_budget && !(*cfg.horizon.budget > 0.0)) {
    throw std::invalid_argument("simulate: budget horizon must be > 0");
  }
  for (double rate : {cfg.failure_rate_global, cfg.failure_rate_local}) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      throw std::invalid_argument("simulate: failure rates must lie in [0, 1]");
    }
  }
  if (cfg.loss_floor && !(*cfg.loss_floor >= 0.0)) {
    throw std::invalid_argument("simulate: loss_floor must be >= 0");
  }
  return {simulate_one(Strategy::global, g, c, cfg), simulate_one(Strategy::local, g, c, cfg)};
}

std::optional<std::int64_t> crossover_empirical(const GainTrajectory& global_t,
                                                const GainTrajectory& local_t) {
  const std::size_t n = std::min(global_t.steps(), local_t.steps());
  for (std::size_t i = 0; i < n; ++i) {
    if (local_reaches_global(local_t.cumulative[i], global_t.cumulative[i])) {
      return static_cast<std::int64_t>(i + 1);
    }
  }
  return std::nullopt;
}

std::int64_t global_gain_below_local_from(const GainModel& g) {
  // alpha gamma^t < beta  <=>  t > log_gamma(beta / alpha)
  const double bound = std::log(g.beta() / g.alpha()) / std::log(g.gamma());
  if (bound < 1.0) {
    return 1;
  }
  return static_cast<std::int64_t>(std::floor(bound)) + 1;
}

}  // namespace irlab
