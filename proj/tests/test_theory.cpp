#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "irlab/theory.hpp"

using namespace irlab;

namespace {

// Oracle: explicit sum of per-step gain differences.
double summed_gap(std::int64_t horizon, double alpha, double beta, double gamma) {
  double total = 0.0;
  double power = 1.0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    power *= gamma;
    total += beta - alpha * power;
  }
  return total;
}

// Oracle: cost_total with the module loop spelled out.
double looped_cost(Strategy s, std::int64_t k, double c0, double c1, double c2, int p) {
  const int touched = s == Strategy::global ? p : 1;
  double total = c0;
  for (int m = 0; m < touched; ++m) total += c1 + c2 * static_cast<double>(k - 1);
  return total;
}

const GainModel kPaperGains(0.3, 0.5, 0.1);

}  // namespace

TEST_CASE("model constructors reject out-of-range parameters") {
  CHECK_THROWS_AS(GainModel(0.0, 0.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(GainModel(0.3, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(GainModel(0.3, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(GainModel(0.3, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(CostModel(-1, 1, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(CostModel(0, 0, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(CostModel(0, 1, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(RatePair(2.0, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(RatePair(1.0, 2.0, 4.0, 3.0), std::invalid_argument);
}

TEST_CASE("cumulative_gap") {
  CHECK(cumulative_gap(std::int64_t{3}, kPaperGains) == doctest::Approx(0.0375).epsilon(1e-12));
  CHECK(cumulative_gap(std::int64_t{0}, kPaperGains) == 0.0);
  CHECK(cumulative_gap(std::int64_t{5}, GainModel(0.3, 1e-12, 0.1)) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(cumulative_gap(std::int64_t{1}, kPaperGains) == doctest::Approx(-0.05));
  CHECK(cumulative_gap(std::int64_t{2}, kPaperGains) == doctest::Approx(-0.025));

  SUBCASE("matches the explicit sum") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.01, 0.99);
    for (int trial = 0; trial < 200; ++trial) {
      const double alpha = unit(rng);
      const double gamma = unit(rng);
      const double beta = alpha * unit(rng);
      const GainModel g(alpha, gamma, beta);
      for (std::int64_t t = 0; t <= 40; ++t) {
        const double expected = summed_gap(t, alpha, beta, gamma);
        CHECK(std::abs(cumulative_gap(t, g) - expected) <= 1e-12 * (1.0 + std::abs(expected)));
      }
    }
  }

  SUBCASE("real horizon agrees at integers") {
    for (std::int64_t t = 0; t < 20; ++t) {
      CHECK(cumulative_gap(static_cast<double>(t), kPaperGains) ==
            doctest::Approx(cumulative_gap(t, kPaperGains)).epsilon(1e-14));
    }
  }

  CHECK_THROWS_AS(cumulative_gap(std::int64_t{-1}, kPaperGains), std::invalid_argument);
}

TEST_CASE("gap_difference") {
  CHECK(gap_difference(0, kPaperGains) == doctest::Approx(-0.05).epsilon(1e-12));
  CHECK(gap_difference(1, kPaperGains) == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(gap_difference(200, kPaperGains) == doctest::Approx(0.1).epsilon(1e-15));
  for (std::int64_t t = 0; t < 30; ++t) {
    CHECK(gap_difference(t, kPaperGains) ==
          doctest::Approx(cumulative_gap(t + 1, kPaperGains) - cumulative_gap(t, kPaperGains))
              .epsilon(1e-12));
  }
}

TEST_CASE("monotone_threshold marks where f starts increasing") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  for (int trial = 0; trial < 300; ++trial) {
    const double alpha = unit(rng);
    const GainModel g(alpha, unit(rng), alpha * unit(rng));
    const std::int64_t t0 = monotone_threshold(g);
    REQUIRE(t0 >= 0);
    for (std::int64_t t = t0; t < t0 + 50; ++t) CHECK(gap_difference(t, g) > 0.0);
    if (t0 > 0) CHECK(gap_difference(t0 - 1, g) <= 0.0);
  }
  CHECK(monotone_threshold(kPaperGains) == 1);
  CHECK(monotone_threshold(GainModel(0.3, 0.5, 0.2)) == 0);
}

TEST_CASE("crossover_point") {
  SUBCASE("reference parameters") {
    const Crossover x = crossover_point(kPaperGains, 100);
    REQUIRE(x.integer_t_star.has_value());
    CHECK(*x.integer_t_star == 3);
    REQUIRE(x.continuous_root.has_value());
    // Reported in the source text as roughly 2.5.
    CHECK(*x.continuous_root == doctest::Approx(2.45).epsilon(0.1 / 2.45));
    CHECK(std::abs(cumulative_gap(*x.continuous_root, kPaperGains)) < 1e-8);
  }
  SUBCASE("local already ahead at T=1") {
    const Crossover x = crossover_point(GainModel(0.3, 0.5, 0.2), 10);
    REQUIRE(x.integer_t_star.has_value());
    CHECK(*x.integer_t_star == 1);
  }
  SUBCASE("scan limit too short") {
    const Crossover x = crossover_point(GainModel(0.3, 0.5, 0.001), 100);
    CHECK_FALSE(x.integer_t_star.has_value());
    const Crossover far = crossover_point(GainModel(0.3, 0.5, 0.001), 1000);
    REQUIRE(far.integer_t_star.has_value());
    CHECK(*far.integer_t_star == 300);
  }
  SUBCASE("direct scan oracle") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    for (int trial = 0; trial < 300; ++trial) {
      const double alpha = unit(rng);
      const double gamma = unit(rng);
      const double beta = alpha * unit(rng);
      const GainModel g(alpha, gamma, beta);
      std::int64_t expected = -1;
      for (std::int64_t t = 1; t <= 5000; ++t) {
        if (summed_gap(t, alpha, beta, gamma) >= 0.0) {
          expected = t;
          break;
        }
      }
      const Crossover x = crossover_point(g, 5000);
      REQUIRE(x.integer_t_star.has_value() == (expected > 0));
      if (expected > 0) {
        // Summation order can move a near-zero f(T) across 0.
        CHECK(std::abs(*x.integer_t_star - expected) <= 1);
        CHECK(cumulative_gap(*x.integer_t_star, g) >= -1e-12);
        if (*x.integer_t_star > 1) CHECK(cumulative_gap(*x.integer_t_star - 1, g) < 0.0);
        // f is convex with f(0) = 0: a positive root exists iff f'(0) < 0.
        const double slope = beta + alpha * gamma * std::log(gamma) / (1.0 - gamma);
        REQUIRE(x.continuous_root.has_value() == (slope < 0.0));
        if (x.continuous_root) {
          CHECK(*x.continuous_root <= static_cast<double>(*x.integer_t_star) + 1e-9);
          CHECK(*x.continuous_root > static_cast<double>(*x.integer_t_star) - 1.0 - 1e-9);
        }
      }
    }
  }
  SUBCASE("f eventually grows without bound") {
    const Crossover x = crossover_point(kPaperGains);
    REQUIRE(x.integer_t_star.has_value());
    CHECK(cumulative_gap(10 * *x.integer_t_star, kPaperGains) > 0.0);
  }
  CHECK_THROWS_AS(crossover_point(kPaperGains, 0), std::invalid_argument);
}

TEST_CASE("exact decimal ties count as crossings") {
  // beta T equals alpha gamma / (1 - gamma) exactly in decimal arithmetic.
  const Crossover a = crossover_point(GainModel(0.5, 0.2, 0.1), 10);
  CHECK(a.integer_t_star == 1);
  const Crossover b = crossover_point(GainModel(0.5, 0.8, 0.01), 1000);
  CHECK(b.integer_t_star == 200);
  CHECK(local_reaches_global(1.0, 1.0 + 1e-15));
  CHECK_FALSE(local_reaches_global(1.0, 1.0 + 1e-9));
}

TEST_CASE("cost_total and effective_step_ratio") {
  const CostModel c(100, 10, 1, 3);
  CHECK(cost_total(Strategy::global, 5, c) == 142.0);
  CHECK(cost_total(Strategy::local, 5, c) == 114.0);
  CHECK(effective_step_ratio(5, c) == doctest::Approx(142.0 / 114.0));
  CHECK(effective_step_ratio(5, c) == doctest::Approx(1.2456).epsilon(1e-4));
  CHECK(effective_step_ratio(1, CostModel(0, 10, 123, 4)) == 4.0);
  CHECK(effective_step_ratio(5, CostModel(1e12, 10, 1, 3)) == doctest::Approx(1.0));
  CHECK(c.module_update_cost(5) == 14.0);

  const CostModel single(7, 3, 2, 1);
  for (std::int64_t k = 1; k < 20; ++k) {
    CHECK(cost_total(Strategy::global, k, single) == cost_total(Strategy::local, k, single));
  }
  for (int p = 1; p <= 6; ++p) {
    const CostModel cp(3.5, 2.25, 0.75, p);
    for (std::int64_t k = 1; k < 30; ++k) {
      for (Strategy s : {Strategy::global, Strategy::local}) {
        CHECK(cost_total(s, k, cp) == doctest::Approx(looped_cost(s, k, 3.5, 2.25, 0.75, p)));
      }
    }
  }
  CHECK_THROWS_AS(cost_total(Strategy::local, 0, c), std::invalid_argument);

  SUBCASE("global minus local is (p - 1) x; the ratio lies in [1, p] and grows with p") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unit(0.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
      const double c0 = unit(rng);
      const double c1 = 0.1 + unit(rng);
      const double c2 = unit(rng);
      const std::int64_t k = 1 + trial % 25;
      double previous = 0.0;
      for (int p = 1; p <= 8; ++p) {
        const CostModel cm(c0, c1, c2, p);
        const double x = cm.module_update_cost(k);
        CHECK(cost_total(Strategy::global, k, cm) - cost_total(Strategy::local, k, cm) ==
              doctest::Approx((p - 1) * x));
        const double ratio = effective_step_ratio(k, cm);
        CHECK(ratio >= 1.0);
        CHECK(ratio <= p * (1 + 1e-15));
        CHECK(ratio >= previous);
        previous = ratio;
      }
    }
  }
}

TEST_CASE("steps_within_budget") {
  const CostModel c(100, 10, 1, 3);
  CHECK(steps_within_budget(Strategy::local, 142, c) == 33);
  CHECK(steps_within_budget(Strategy::global, 142, c) == 5);
  CHECK_THROWS_AS(steps_within_budget(Strategy::local, 109, c), std::invalid_argument);
  CHECK_THROWS_AS(steps_within_budget(Strategy::local, 1000, CostModel(0, 1, 0, 2)),
                  std::domain_error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.1, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const CostModel cm(unit(rng) * 10, unit(rng), unit(rng), 1 + trial % 5);
    const double budget = cost_total(Strategy::global, 1, cm) + unit(rng) * 200;
    for (Strategy s : {Strategy::global, Strategy::local}) {
      const std::int64_t k = steps_within_budget(s, budget, cm);
      CHECK(cost_total(s, k, cm) <= budget);
      CHECK(cost_total(s, k + 1, cm) > budget);
    }
  }
}

TEST_CASE("replayed costs") {
  const CostModel c(100, 10, 1, 3);
  CHECK(step_cost(Strategy::local, 1, c) == 10.0);
  CHECK(step_cost(Strategy::local, 5, c) == 14.0);
  CHECK(step_cost(Strategy::global, 5, c) == 42.0);
  CHECK(step_cost(Strategy::global, 50, c, 10) == 60.0);
  CHECK(replayed_cost(Strategy::local, 0, c) == 100.0);
  CHECK(replayed_cost(Strategy::local, 3, c) == 100.0 + 10 + 11 + 12);

  // Per-step accounting without history: N_local = 40 and N_global = 10 at budget 40.
  const CostModel flat(0, 1, 0, 4);
  CHECK(replayed_steps_within_budget(Strategy::local, 40, flat) == 40);
  CHECK(replayed_steps_within_budget(Strategy::global, 40, flat) == 10);
  CHECK_THROWS_AS(replayed_steps_within_budget(Strategy::global, 3.9, flat),
                  std::invalid_argument);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const CostModel cm(unit(rng), 0.5 + unit(rng), unit(rng), 1 + trial % 4);
    const std::int64_t cap = trial % 3 == 0 ? kUnboundedHistory : trial % 7;
    const double budget = replayed_cost(Strategy::global, 1, cm, cap) + 40 * unit(rng);
    for (Strategy s : {Strategy::global, Strategy::local}) {
      const std::int64_t n = replayed_steps_within_budget(s, budget, cm, cap);
      CHECK(replayed_cost(s, n, cm, cap) <= budget);
      CHECK(replayed_cost(s, n + 1, cm, cap) > budget);
    }
  }
}

TEST_CASE("rate_bound") {
  CHECK(rate_bound(0.75, 2, 2.5) == doctest::Approx(1.40625).epsilon(1e-15));
  CHECK(rate_bound(0.3, 0, 4.0) == 4.0);
  CHECK(rate_bound(0.0, 1, 7.0) == 0.0);
}

TEST_CASE("superiority_condition") {
  SUBCASE("local wins") {
    const ConditionReport r =
        superiority_condition(CostModel(0, 1, 0, 2), RatePair(1, 10, 0.5, 1), 5);
    CHECK(r.lhs_lemma == doctest::Approx(0.5));
    CHECK(r.rhs == doctest::Approx(std::log(0.5) / std::log(0.9)));
    CHECK(r.rhs == doctest::Approx(6.579).epsilon(1e-4));
    CHECK(r.holds_as_stated);
    CHECK(r.lhs_reciprocal == doctest::Approx(2.0));
    CHECK(r.holds_reciprocal);
  }
  SUBCASE("local loses") {
    const ConditionReport r =
        superiority_condition(CostModel(0, 1, 0, 2), RatePair(1, 4, 0.5, 4), 5);
    CHECK(r.lhs_lemma == doctest::Approx(0.5));
    CHECK(r.rhs == doctest::Approx(0.4642).epsilon(1e-4));
    CHECK_FALSE(r.holds_as_stated);
    CHECK_FALSE(r.holds_reciprocal);
  }
  SUBCASE("one module is a strict tie") {
    const ConditionReport r =
        superiority_condition(CostModel(5, 1, 1, 1), RatePair(1, 10, 1, 10), 3);
    CHECK(r.lhs_lemma == 1.0);
    CHECK(r.rhs == 1.0);
    CHECK_FALSE(r.holds_as_stated);
    CHECK_FALSE(r.holds_reciprocal);
  }
  SUBCASE("degenerate rates") {
    CHECK_THROWS_AS(superiority_condition(CostModel(0, 1, 0, 2), RatePair(1, 1, 0.5, 1), 1),
                    std::domain_error);
    CHECK_THROWS_AS(superiority_condition(CostModel(0, 1, 0, 2), RatePair(1, 10, 1, 1), 1),
                    std::domain_error);
  }
  SUBCASE("mu1 outside its bracket") {
    CHECK_THROWS_AS(superiority_condition(CostModel(0, 1, 0, 4), RatePair(1, 10, 0.1, 2), 1),
                    std::invalid_argument);
  }
  SUBCASE("default mu1 sits at the lower end") {
    const RatePair r = RatePair::with_default_mu1(2.0, 10.0, 5.0, 4);
    CHECK(r.mu1() == 0.5);
    CHECK(r.mu1_in_bracket(4));
    CHECK_FALSE(r.mu1_in_bracket(3));
  }
}
