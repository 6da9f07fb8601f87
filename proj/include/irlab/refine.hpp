#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "irlab/pipeline.hpp"
#include "irlab/theory.hpp"

namespace irlab {

using Rng = std::mt19937_64;

enum class UpdateMode { iterative, global };
enum class SelectorKind { round_robin, uniform_random, stale_first };
enum class ProposerKind { exhaustive, random_subset };
enum class InitMode { unified, sequential };

std::string_view to_string(UpdateMode v);
std::string_view to_string(SelectorKind v);
std::string_view to_string(ProposerKind v);
std::string_view to_string(InitMode v);
UpdateMode update_mode_from_string(std::string_view text);
SelectorKind selector_from_string(std::string_view text);
ProposerKind proposer_from_string(std::string_view text);
InitMode init_mode_from_string(std::string_view text);

/// Cost-model strategy matching an update mode.
inline Strategy cost_strategy(UpdateMode m) {
  return m == UpdateMode::iterative ? Strategy::local : Strategy::global;
}

struct StrategyConfig {
  UpdateMode mode = UpdateMode::iterative;
  SelectorKind selector = SelectorKind::round_robin;
  ProposerKind proposer = ProposerKind::random_subset;
  // Candidates per iterative step, or fresh tuples per global step. Only
  // read by the random_subset proposer; exhaustive global steps draw one tuple.
  std::size_t subset_size = 1;
  InitMode init_mode = InitMode::unified;
  std::int64_t max_iterations = 20;
  double failure_rate = 0.0;
  std::int64_t history_cap = 10;
  // Global mode only: commit every fresh tuple as the current pipeline even
  // when it is worse. The best-so-far is still tracked.
  bool global_always_commit = false;
  double c0 = 0.0;
  double c1 = 1.0;
  double c2 = 0.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on the first violated constraint.
  void validate() const;
  /// Token cost model with p = `modules`.
  CostModel cost_model(std::size_t modules) const;
};

struct HistoryEntry {
  std::int64_t iteration = 0;
  std::optional<std::size_t> component;  // empty: all components
  std::string candidate_summary;
  bool accepted = false;
  bool failed = false;
  std::optional<double> loss_observed;
  double best_loss = 0.0;   // after the step
  double cum_tokens = 0.0;  // after the step
};

struct RefinementState {
  PipelineConfig current;
  double current_loss = 0.0;
  PipelineConfig best;
  double best_loss = 0.0;
  std::int64_t iteration = 0;  // completed refinement steps
  std::vector<HistoryEntry> history;
  double cumulative_cost = 0.0;
  std::uint64_t evaluations = 0;
  // Per component: step of the last accepted change / last selection, -1 if none.
  std::vector<std::int64_t> last_accepted;
  std::vector<std::int64_t> last_touched;
};

RefinementState initialize(const Benchmark& b, InitMode mode, Rng& rng, const CostModel& cost);
RefinementState initialize(const Benchmark& b, InitMode mode, std::uint64_t seed,
                           const CostModel& cost);

/// Component the next iterative step works on.
///
/// round_robin cycles through components by step count. stale_first picks the
/// component whose last accepted change is oldest (never-accepted counts as
/// oldest); ties go to the least recently selected, then the lowest index.
std::size_t select_component(const RefinementState& state, SelectorKind selector, Rng& rng);

/// One refinement step; accept-if-strictly-improved in both modes.
RefinementState refine_step(RefinementState state, const Benchmark& b, const StrategyConfig& cfg,
                            Rng& rng);

struct Trajectory {
  UpdateMode mode = UpdateMode::iterative;
  PipelineConfig initial;
  double initial_loss = 0.0;
  double initial_tokens = 0.0;
  std::vector<HistoryEntry> entries;
  std::vector<PipelineConfig> best_configs;  // best config after entries[i]
  PipelineConfig final_best;
  double final_best_loss = 0.0;
  double cumulative_cost = 0.0;
  std::uint64_t evaluations = 0;

  std::size_t accepted_count() const;
  std::size_t failed_count() const;
};

/// initialize + max_iterations refine steps, all randomness from cfg.seed.
Trajectory run(const Benchmark& b, const StrategyConfig& cfg);

/// Compact history: the `cap` most recent entries plus older accepted
/// entries (newest `cap` of those), in chronological order. Length <= 2 cap.
std::vector<HistoryEntry> summarize_history(std::span<const HistoryEntry> entries,
                                            std::size_t cap);

}  // namespace irlab
