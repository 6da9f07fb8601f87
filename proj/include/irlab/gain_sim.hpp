#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "irlab/theory.hpp"

namespace irlab {

// deterministic: gains sit exactly on their bounds (alpha gamma^t for global,
// beta for local). stochastic: global ~ U[0, alpha gamma^t], local ~ beta (1 + U[0, 0.5]).
enum class GainMode { deterministic, stochastic };

std::string_view to_string(GainMode m);
GainMode gain_mode_from_string(std::string_view text);

struct SimHorizon {
  std::optional<std::int64_t> iterations;
  std::optional<double> budget;

  static SimHorizon steps(std::int64_t n) { return {n, std::nullopt}; }
  static SimHorizon tokens(double b) { return {std::nullopt, b}; }
};

struct SimConfig {
  GainMode mode = GainMode::deterministic;
  SimHorizon horizon = SimHorizon::steps(10);
  // Total attainable improvement; gains are clipped at the remaining gap.
  std::optional<double> loss_floor;
  double failure_rate_global = 0.0;
  double failure_rate_local = 0.0;
  std::uint64_t seed = 0;
};

struct GainTrajectory {
  Strategy strategy = Strategy::global;
  GainMode mode = GainMode::deterministic;
  std::uint64_t seed = 0;
  // Index i holds step t = i + 1.
  std::vector<double> gains;
  std::vector<double> cumulative;
  std::vector<double> token_costs;
  std::vector<bool> failed;

  std::size_t steps() const { return gains.size(); }
};

/// Simulates both strategies; returns {global, local}. Token costs follow
/// replayed_cost with unbounded history. Under a budget horizon each strategy
/// stops before the step that would exceed the budget.
std::pair<GainTrajectory, GainTrajectory> simulate(const GainModel& g, const CostModel& c,
                                                   const SimConfig& cfg);

/// Least T (1-based) with cumulative local >= cumulative global (ties per
/// local_reaches_global), over the common prefix of both trajectories.
std::optional<std::int64_t> crossover_empirical(const GainTrajectory& global_t,
                                                const GainTrajectory& local_t);

/// First step t >= 1 from which alpha gamma^t < beta for good.
std::int64_t global_gain_below_local_from(const GainModel& g);

}  // namespace irlab
