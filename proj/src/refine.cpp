#include "irlab/refine.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <utility>

namespace irlab {

std::string_view to_string(UpdateMode v) {
  return v == UpdateMode::iterative ? "iterative" : "global";
}

std::string_view to_string(SelectorKind v) {
  switch (v) {
    case SelectorKind::round_robin: return "round_robin";
    case SelectorKind::uniform_random: return "uniform_random";
    case SelectorKind::stale_first: return "stale_first";
  }
  return "?";
}

std::string_view to_string(ProposerKind v) {
  return v == ProposerKind::exhaustive ? "exhaustive" : "random_subset";
}

std::string_view to_string(InitMode v) {
  return v == InitMode::unified ? "unified" : "sequential";
}

UpdateMode update_mode_from_string(std::string_view text) {
  if (text == "iterative") return UpdateMode::iterative;
  if (text == "global") return UpdateMode::global;
  throw std::invalid_argument("unknown mode '" + std::string(text) +
                              "' (expected iterative or global)");
}

SelectorKind selector_from_string(std::string_view text) {
  if (text == "round_robin") return SelectorKind::round_robin;
  if (text == "uniform_random") return SelectorKind::uniform_random;
  if (text == "stale_first") return SelectorKind::stale_first;
  throw std::invalid_argument("unknown selector '" + std::string(text) +
                              "' (expected round_robin, uniform_random or stale_first)");
}

ProposerKind proposer_from_string(std::string_view text) {
  if (text == "exhaustive") return ProposerKind::exhaustive;
  if (text == "random_subset") return ProposerKind::random_subset;
  throw std::invalid_argument("unknown proposer '" + std::string(text) +
                              "' (expected exhaustive or random_subset)");
}

InitMode init_mode_from_string(std::string_view text) {
  if (text == "unified") return InitMode::unified;
  if (text == "sequential") return InitMode::sequential;
  throw std::invalid_argument("unknown init_mode '" + std::string(text) +
                              "' (expected unified or sequential)");
}

void StrategyConfig::validate() const {
  if (max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be >= 1");
  }
  if (subset_size < 1) {
    throw std::invalid_argument("subset_size must be >= 1");
  }
  if (history_cap < 1) {
    throw std::invalid_argument("history_cap must be >= 1");
  }
  if (!(failure_rate >= 0.0 && failure_rate < 1.0)) {
    throw std::invalid_argument("failure_rate must lie in [0, 1)");
  }
  if (global_always_commit && mode != UpdateMode::global) {
    throw std::invalid_argument("global_always_commit requires mode = global");
  }
}

CostModel StrategyConfig::cost_model(std::size_t modules) const {
  return CostModel(c0, c1, c2, static_cast<int>(modules));
}

namespace {

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

PipelineConfig random_config(const Benchmark& b, Rng& rng) {
  PipelineConfig cfg;
  cfg.selections.reserve(b.components());
  for (const auto& space : b.spaces()) {
    cfg.selections.push_back(uniform_index(rng, space.size()));
  }
  return cfg;
}

double evaluate_counted(RefinementState& state, const Benchmark& b, const PipelineConfig& cfg) {
  return evaluate(b, cfg, state.evaluations++);
}

struct Proposal {
  PipelineConfig config;
  double loss = 0.0;
};

// Best of the candidate substitutions for component j, or nothing when the
// space has no alternative to the current selection.
std::optional<Proposal> propose_local(RefinementState& state, const Benchmark& b,
                                      const StrategyConfig& cfg, std::size_t j, Rng& rng) {
  const std::size_t n = b.space(j).size();
  const std::size_t current = state.current.selections[j];
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != current) pool.push_back(i);
  }
  if (pool.empty()) {
    return std::nullopt;
  }
  if (cfg.proposer == ProposerKind::random_subset && cfg.subset_size < pool.size()) {
    std::vector<std::size_t> picked;
    std::sample(pool.begin(), pool.end(), std::back_inserter(picked), cfg.subset_size, rng);
    pool = std::move(picked);
  }
  std::optional<Proposal> best;
  for (std::size_t i : pool) {
    PipelineConfig trial = state.current;
    trial.selections[j] = i;
    const double loss = evaluate_counted(state, b, trial);
    if (!best || loss < best->loss) {
      best = Proposal{std::move(trial), loss};
    }
  }
  return best;
}

std::optional<Proposal> propose_global(RefinementState& state, const Benchmark& b,
                                       const StrategyConfig& cfg, Rng& rng) {
  if (b.configuration_count() < 2) {
    return std::nullopt;
  }
  const std::size_t draws = cfg.proposer == ProposerKind::random_subset ? cfg.subset_size : 1;
  std::optional<Proposal> best;
  for (std::size_t d = 0; d < draws; ++d) {
    PipelineConfig trial = random_config(b, rng);
    while (trial == state.current) {
      trial = random_config(b, rng);
    }
    const double loss = evaluate_counted(state, b, trial);
    if (!best || loss < best->loss) {
      best = Proposal{std::move(trial), loss};
    }
  }
  return best;
}

std::string summarize_change(const Benchmark& b, const PipelineConfig& cfg,
                             std::optional<std::size_t> component) {
  if (component) {
    return "S" + std::to_string(*component) + "=" +
           b.space(*component).candidate(cfg.selections[*component]).label;
  }
  return b.describe(cfg);
}

}  // namespace

RefinementState initialize(const Benchmark& b, InitMode mode, Rng& rng, const CostModel& cost) {
  if (static_cast<std::size_t>(cost.modules()) != b.components()) {
    throw std::invalid_argument("initialize: cost model module count differs from benchmark k");
  }
  RefinementState state;
  const std::size_t k = b.components();
  if (mode == InitMode::unified) {
    state.current = random_config(b, rng);
    state.current_loss = evaluate_counted(state, b, state.current);
  } else {
    // Bottom-up: fix one component at a time, evaluating the pipeline with
    // the not-yet-chosen components held at candidate 0.
    PipelineConfig partial{std::vector<std::size_t>(k, 0)};
    for (std::size_t j = 0; j < k; ++j) {
      partial.selections[j] = uniform_index(rng, b.space(j).size());
      state.current_loss = evaluate_counted(state, b, partial);
    }
    state.current = std::move(partial);
  }
  state.best = state.current;
  state.best_loss = state.current_loss;
  state.cumulative_cost = cost.c0();
  state.last_accepted.assign(k, -1);
  state.last_touched.assign(k, -1);
  return state;
}

RefinementState initialize(const Benchmark& b, InitMode mode, std::uint64_t seed,
                           const CostModel& cost) {
  Rng rng(seed);
  return initialize(b, mode, rng, cost);
}

std::size_t select_component(const RefinementState& state, SelectorKind selector, Rng& rng) {
  const std::size_t k = state.current.size();
  if (k == 0) {
    throw std::invalid_argument("select_component: empty pipeline");
  }
  switch (selector) {
    case SelectorKind::round_robin:
      return static_cast<std::size_t>(state.iteration) % k;
    case SelectorKind::uniform_random:
      return uniform_index(rng, k);
    case SelectorKind::stale_first: {
      std::size_t pick = 0;
      for (std::size_t j = 1; j < k; ++j) {
        const auto key = std::pair(state.last_accepted[j], state.last_touched[j]);
        if (key < std::pair(state.last_accepted[pick], state.last_touched[pick])) {
          pick = j;
        }
      }
      return pick;
    }
  }
  throw std::logic_error("select_component: unhandled selector");
}

RefinementState refine_step(RefinementState state, const Benchmark& b, const StrategyConfig& cfg,
                            Rng& rng) {
  const CostModel cost = cfg.cost_model(b.components());
  const std::int64_t step = state.iteration + 1;

  HistoryEntry entry;
  entry.iteration = step;
  if (cfg.mode == UpdateMode::iterative) {
    entry.component = select_component(state, cfg.selector, rng);
    state.last_touched[*entry.component] = step;
  }
  const bool failed = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < cfg.failure_rate;

  std::optional<Proposal> proposal;
  if (failed) {
    entry.failed = true;
    entry.candidate_summary = "failed";
  } else {
    try {
      proposal = cfg.mode == UpdateMode::iterative
                     ? propose_local(state, b, cfg, *entry.component, rng)
                     : propose_global(state, b, cfg, rng);
    } catch (const std::exception& e) {
      entry.failed = true;
      entry.candidate_summary = std::string("failed: ") + e.what();
    }
    if (!entry.failed && !proposal) {
      entry.candidate_summary = "no-alternative";
    }
  }

  if (proposal) {
    entry.candidate_summary = summarize_change(b, proposal->config, entry.component);
    entry.loss_observed = proposal->loss;
    if (proposal->loss < state.best_loss) {
      entry.accepted = true;
      for (std::size_t j = 0; j < state.current.size(); ++j) {
        if (proposal->config.selections[j] != state.best.selections[j]) {
          state.last_accepted[j] = step;
        }
      }
      state.best = proposal->config;
      state.best_loss = proposal->loss;
      state.current = std::move(proposal->config);
      state.current_loss = proposal->loss;
    } else if (cfg.global_always_commit) {
      state.current = std::move(proposal->config);
      state.current_loss = proposal->loss;
    }
  }

  state.cumulative_cost += step_cost(cost_strategy(cfg.mode), step, cost, cfg.history_cap);
  state.iteration = step;
  entry.best_loss = state.best_loss;
  entry.cum_tokens = state.cumulative_cost;
  state.history.push_back(std::move(entry));
  state.history = summarize_history(state.history, static_cast<std::size_t>(cfg.history_cap));
  return state;
}

std::size_t Trajectory::accepted_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.accepted; }));
}

std::size_t Trajectory::failed_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.failed; }));
}

Trajectory run(const Benchmark& b, const StrategyConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  RefinementState state = initialize(b, cfg.init_mode, rng, cfg.cost_model(b.components()));

  Trajectory out;
  out.mode = cfg.mode;
  out.initial = state.current;
  out.initial_loss = state.current_loss;
  out.initial_tokens = state.cumulative_cost;
  out.entries.reserve(static_cast<std::size_t>(cfg.max_iterations));
  for (std::int64_t t = 0; t < cfg.max_iterations; ++t) {
    state = refine_step(std::move(state), b, cfg, rng);
    out.entries.push_back(state.history.back());
    out.best_configs.push_back(state.best);
  }
  out.final_best = state.best;
  out.final_best_loss = state.best_loss;
  out.cumulative_cost = state.cumulative_cost;
  out.evaluations = state.evaluations;
  return out;
}

std::vector<HistoryEntry> summarize_history(std::span<const HistoryEntry> entries,
                                            std::size_t cap) {
  if (cap < 1) {
    throw std::invalid_argument("summarize_history: cap must be >= 1");
  }
  if (entries.size() <= cap) {
    return {entries.begin(), entries.end()};
  }
  const std::size_t recent_start = entries.size() - cap;
  std::vector<std::size_t> older_accepted;
  for (std::size_t i = 0; i < recent_start; ++i) {
    if (entries[i].accepted) older_accepted.push_back(i);
  }
  if (older_accepted.size() > cap) {
    older_accepted.erase(older_accepted.begin(),
                         older_accepted.end() - static_cast<std::ptrdiff_t>(cap));
  }
  std::vector<HistoryEntry> out;
  out.reserve(older_accepted.size() + cap);
  for (std::size_t i : older_accepted) {
    out.push_back(entries[i]);
  }
  out.insert(out.end(), entries.begin() + static_cast<std::ptrdiff_t>(recent_start),
             entries.end());
  return out;
}

}  // namespace irlab
