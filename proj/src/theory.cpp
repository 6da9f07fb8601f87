#include "irlab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace irlab {

std::string_view to_string(Strategy s) {
  return s == Strategy::global ? "global" : "local";
}

GainModel::GainModel(double alpha, double gamma, double beta)
    : alpha_(alpha), gamma_(gamma), beta_(beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("GainModel: alpha must be > 0, got " + std::to_string(alpha));
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("GainModel: gamma must lie in (0, 1), got " + std::to_string(gamma));
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("GainModel: beta must be > 0, got " + std::to_string(beta));
  }
}

CostModel::CostModel(double c0, double c1, double c2, int modules)
    : c0_(c0), c1_(c1), c2_(c2), modules_(modules) {
  if (modules < 1) {
    throw std::invalid_argument("CostModel: module count p must be >= 1");
  }
  if (!(c1 > 0.0) || !std::isfinite(c1)) {
    throw std::invalid_argument("CostModel: c1 must be > 0");
  }
  if (!(c0 >= 0.0) || !(c2 >= 0.0) || !std::isfinite(c0) || !std::isfinite(c2)) {
    throw std::invalid_argument("CostModel: c0 and c2 must be >= 0");
  }
}

double CostModel::module_update_cost(std::int64_t k) const {
  if (k < 1) {
    throw std::invalid_argument("CostModel: iteration count k must be >= 1");
  }
  return c1_ + c2_ * static_cast<double>(k - 1);
}

RatePair::RatePair(double mu, double smoothness, double mu1, double lmax)
    : mu_(mu), smoothness_(smoothness), mu1_(mu1), lmax_(lmax) {
  if (!(mu > 0.0) || !(smoothness >= mu)) {
    throw std::invalid_argument("RatePair: need 0 < mu <= L");
  }
  if (!(mu1 > 0.0) || !(lmax >= mu1)) {
    throw std::invalid_argument("RatePair: need 0 < mu1 <= Lmax");
  }
}

RatePair RatePair::with_default_mu1(double mu, double smoothness, double lmax, int modules) {
  if (modules < 1) {
    throw std::invalid_argument("RatePair: module count must be >= 1");
  }
  return RatePair(mu, smoothness, mu / modules, lmax);
}

bool RatePair::mu1_in_bracket(int modules) const {
  const double slack = 1e-12 * mu_;
  return mu1_ >= mu_ / modules - slack && mu1_ <= mu_ + slack;
}

double cumulative_gap(double horizon, const GainModel& g) {
  const double gamma = g.gamma();
  return g.beta() * horizon - g.alpha() * gamma * (1.0 - std::pow(gamma, horizon)) / (1.0 - gamma);
}

double cumulative_gap(std::int64_t horizon, const GainModel& g) {
  if (horizon < 0) {
    throw std::invalid_argument("cumulative_gap: T must be >= 0");
  }
  return cumulative_gap(static_cast<double>(horizon), g);
}

double gap_difference(std::int64_t horizon, const GainModel& g) {
  if (horizon < 0) {
    throw std::invalid_argument("gap_difference: T must be >= 0");
  }
  return g.beta() - g.alpha() * std::pow(g.gamma(), static_cast<double>(horizon + 1));
}

std::int64_t monotone_threshold(const GainModel& g) {
  // beta - alpha gamma^(T+1) > 0  <=>  T > log_gamma(beta / alpha) - 1
  const double bound = std::log(g.beta() / g.alpha()) / std::log(g.gamma()) - 1.0;
  if (bound < 0.0) {
    return 0;
  }
  return static_cast<std::int64_t>(std::floor(bound)) + 1;
}

bool local_reaches_global(double local_total, double global_total) {
  const double scale = std::abs(local_total) + std::abs(global_total);
  return local_total - global_total >= -kTieTolerance * scale;
}

Crossover crossover_point(const GainModel& g, std::int64_t t_max) {
  if (t_max < 1) {
    throw std::invalid_argument("crossover_point: T_max must be >= 1");
  }
  Crossover out;
  const double decay_scale = g.alpha() * g.gamma() / (1.0 - g.gamma());
  for (std::int64_t t = 1; t <= t_max; ++t) {
    const double local_total = g.beta() * static_cast<double>(t);
    const double global_total = decay_scale * (1.0 - std::pow(g.gamma(), static_cast<double>(t)));
    if (local_reaches_global(local_total, global_total)) {
      out.integer_t_star = t;
      break;
    }
  }
  if (!out.integer_t_star) {
    return out;
  }

  const double alpha = g.alpha();
  const double beta = g.beta();
  const double gamma = g.gamma();
  const double log_gamma = std::log(gamma);
  // f'(0) = beta + alpha gamma ln(gamma) / (1 - gamma)
  const double slope_at_zero = beta + alpha * gamma * log_gamma / (1.0 - gamma);
  if (slope_at_zero >= 0.0) {
    return out;
  }
  // f' vanishes where gamma^T = -beta (1 - gamma) / (alpha gamma ln gamma).
  double lo = std::log(-beta * (1.0 - gamma) / (alpha * gamma * log_gamma)) / log_gamma;
  double hi = static_cast<double>(*out.integer_t_star);
  if (!(cumulative_gap(lo, g) < 0.0)) {
    return out;
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (cumulative_gap(mid, g) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.continuous_root = 0.5 * (lo + hi);
  return out;
}

double cost_total(Strategy s, std::int64_t k, const CostModel& c) {
  const double x = c.module_update_cost(k);
  if (s == Strategy::local) {
    return c.c0() + x;
  }
  const double p = c.modules();
  return c.c0() + p * c.c1() + p * c.c2() * static_cast<double>(k - 1);
}

double effective_step_ratio(std::int64_t k, const CostModel& c) {
  const double x = c.module_update_cost(k);
  return (c.c0() + c.modules() * x) / (c.c0() + x);
}

std::int64_t steps_within_budget(Strategy s, double budget, const CostModel& c) {
  if (cost_total(s, 1, c) > budget) {
    throw std::invalid_argument("steps_within_budget: budget " + std::to_string(budget) +
                                " does not cover a single " + std::string(to_string(s)) +
                                " iteration");
  }
  if (c.c2() == 0.0) {
    throw std::domain_error("steps_within_budget: c2 = 0 makes every k affordable");
  }
  const double per_step = s == Strategy::local ? c.c2() : c.modules() * c.c2();
  auto k = static_cast<std::int64_t>(std::floor((budget - cost_total(s, 1, c)) / per_step)) + 1;
  // Correct the floating-point estimate against the formula itself.
  while (k > 1 && cost_total(s, k, c) > budget) {
    --k;
  }
  while (cost_total(s, k + 1, c) <= budget) {
    ++k;
  }
  return k;
}

double step_cost(Strategy s, std::int64_t step, const CostModel& c, std::int64_t history_cap) {
  if (step < 1) {
    throw std::invalid_argument("step_cost: step must be >= 1");
  }
  if (history_cap < 0) {
    throw std::invalid_argument("step_cost: history cap must be >= 0");
  }
  const auto history = static_cast<double>(std::min(step - 1, history_cap));
  if (s == Strategy::local) {
    return c.c1() + c.c2() * history;
  }
  const double p = c.modules();
  return p * c.c1() + p * c.c2() * history;
}

double replayed_cost(Strategy s, std::int64_t steps, const CostModel& c, std::int64_t history_cap) {
  if (steps < 0) {
    throw std::invalid_argument("replayed_cost: step count must be >= 0");
  }
  double total = c.c0();
  for (std::int64_t t = 1; t <= steps; ++t) {
    total += step_cost(s, t, c, history_cap);
  }
  return total;
}

std::int64_t replayed_steps_within_budget(Strategy s, double budget, const CostModel& c,
                                          std::int64_t history_cap) {
  constexpr std::int64_t kStepLimit = 100'000'000;
  double total = c.c0();
  std::int64_t steps = 0;
  while (true) {
    const double next = total + step_cost(s, steps + 1, c, history_cap);
    if (next > budget) {
      break;
    }
    total = next;
    if (++steps >= kStepLimit) {
      throw std::domain_error("replayed_steps_within_budget: budget admits more than 1e8 steps");
    }
  }
  if (steps == 0) {
    throw std::invalid_argument("replayed_steps_within_budget: budget " + std::to_string(budget) +
                                " does not cover initialization plus one " +
                                std::string(to_string(s)) + " step");
  }
  return steps;
}

double rate_bound(double rate, std::int64_t steps, double initial_gap) {
  return std::pow(rate, static_cast<double>(steps)) * initial_gap;
}

ConditionReport superiority_condition(const CostModel& c, const RatePair& r, std::int64_t k) {
  if (r.global_rate() <= 0.0 || r.local_rate() <= 0.0) {
    throw std::domain_error(
        "superiority_condition: a contraction rate is zero (mu = L or mu1 = Lmax); "
        "the logarithm base is degenerate");
  }
  if (!r.mu1_in_bracket(c.modules())) {
    throw std::invalid_argument("superiority_condition: mu1 outside [mu/p, mu]");
  }
  const double x = c.module_update_cost(k);
  const double p = c.modules();
  ConditionReport out;
  out.lhs_lemma = (c.c0() + x) / (c.c0() + p * x);
  out.lhs_reciprocal = (c.c0() + p * x) / (c.c0() + x);
  out.rhs = std::log1p(-r.mu1() / r.lmax()) / std::log1p(-r.mu() / r.smoothness());
  out.holds_as_stated = out.lhs_lemma < out.rhs;
  out.holds_reciprocal = out.lhs_reciprocal < out.rhs;
  return out;
}

}  // namespace irlab
