#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

namespace irlab {

enum class Strategy { global, local };

std::string_view to_string(Strategy s);

/// Gain processes of the two update strategies: global gains are bounded
/// above by alpha * gamma^t, local gains are bounded below by beta.
class GainModel {
 public:
  GainModel(double alpha, double gamma, double beta);

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double beta() const { return beta_; }

 private:
  double alpha_;
  double gamma_;
  double beta_;
};

/// Token cost decomposition. c0 is paid once at initialization, c1 per
/// module touched by an update, c2 per module per step of logged history.
class CostModel {
 public:
  CostModel(double c0, double c1, double c2, int modules);

  double c0() const { return c0_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  int modules() const { return modules_; }

  /// x(k) = c1 + c2 (k - 1), k >= 1.
  double module_update_cost(std::int64_t k) const;

 private:
  double c0_;
  double c1_;
  double c2_;
  int modules_;
};

/// Strong convexity / smoothness constants for the full-gradient and the
/// coordinate-wise methods.
class RatePair {
 public:
  RatePair(double mu, double smoothness, double mu1, double lmax);

  /// mu1 defaults to mu / p, the conservative end of [mu/p, mu].
  static RatePair with_default_mu1(double mu, double smoothness, double lmax, int modules);

  double mu() const { return mu_; }
  double smoothness() const { return smoothness_; }
  double mu1() const { return mu1_; }
  double lmax() const { return lmax_; }

  double global_rate() const { return 1.0 - mu_ / smoothness_; }
  double local_rate() const { return 1.0 - mu1_ / lmax_; }

  /// True when mu/p <= mu1 <= mu (up to 1e-12 relative slack).
  bool mu1_in_bracket(int modules) const;

 private:
  double mu_;
  double smoothness_;
  double mu1_;
  double lmax_;
};

// Cumulative gap f(T) = beta T - alpha gamma (1 - gamma^T) / (1 - gamma).
double cumulative_gap(std::int64_t horizon, const GainModel& g);
double cumulative_gap(double horizon, const GainModel& g);

// f(T+1) - f(T) = beta - alpha gamma^(T+1).
double gap_difference(std::int64_t horizon, const GainModel& g);

/// Smallest T >= 0 from which gap_difference stays strictly positive.
std::int64_t monotone_threshold(const GainModel& g);

// Relative rounding allowance for crossing tests.
inline constexpr double kTieTolerance = 1e-12;

/// Crossing test shared by the closed form and the simulation: the local
/// total reaches the global total, differences within kTieTolerance of the
/// totals' magnitude counting as ties.
bool local_reaches_global(double local_total, double global_total);

struct Crossover {
  std::optional<std::int64_t> integer_t_star;
  std::optional<double> continuous_root;
};

inline constexpr std::int64_t kDefaultCrossoverScan = 1'000'000;

/// Least integer T in [1, t_max] with f(T) >= 0 (upward scan, ties per
/// local_reaches_global on f's two terms) together with
/// the positive real root of f found by bisection to 1e-9.
///
/// f is convex with f(0) = 0, so a positive root exists iff f'(0) < 0. The
/// bisection bracket is [argmin f, T*]. Both results are absent when f stays
/// negative up to t_max.
Crossover crossover_point(const GainModel& g, std::int64_t t_max = kDefaultCrossoverScan);

double cost_total(Strategy s, std::int64_t k, const CostModel& c);

double effective_step_ratio(std::int64_t k, const CostModel& c);

/// Largest k with cost_total(s, k, c) <= budget.
/// Throws std::invalid_argument when k = 1 already exceeds the budget and
/// std::domain_error when the count is unbounded (c2 == 0).
std::int64_t steps_within_budget(Strategy s, double budget, const CostModel& c);

inline constexpr std::int64_t kUnboundedHistory = std::numeric_limits<std::int64_t>::max();

// Tokens charged by the step-th update (step >= 1) when the update prompt
// carries min(step - 1, history_cap) steps of history:
// cost_total(s, h + 1, c) - c0.
double step_cost(Strategy s, std::int64_t step, const CostModel& c,
                 std::int64_t history_cap = kUnboundedHistory);

// c0 plus step_cost summed over steps 1..steps, accumulated in step order.
double replayed_cost(Strategy s, std::int64_t steps, const CostModel& c,
                     std::int64_t history_cap = kUnboundedHistory);

/// Largest n with replayed_cost(s, n, c, history_cap) <= budget.
/// Throws std::invalid_argument when not even one step fits.
std::int64_t replayed_steps_within_budget(Strategy s, double budget, const CostModel& c,
                                          std::int64_t history_cap = kUnboundedHistory);

double rate_bound(double rate, std::int64_t steps, double initial_gap);

struct ConditionReport {
  double lhs_lemma = 0.0;       // (c0 + x) / (c0 + p x)
  double rhs = 0.0;             // ln(1 - mu1/Lmax) / ln(1 - mu/L)
  bool holds_as_stated = false; // lhs_lemma < rhs
  double lhs_reciprocal = 0.0;  // (c0 + p x) / (c0 + x)
  bool holds_reciprocal = false;
};

/// Cost-normalized superiority condition for local (coordinate) updates.
/// Both orientations of the cost ratio are reported.
///
/// Throws std::domain_error when either rate is exactly zero (one-step
/// convergence, log base degenerate) and std::invalid_argument when mu1 lies
/// outside [mu/p, mu] for the cost model's module count.
ConditionReport superiority_condition(const CostModel& c, const RatePair& r, std::int64_t k);

}  // namespace irlab
