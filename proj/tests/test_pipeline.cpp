#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <doctest.h>

#include "irlab/pipeline.hpp"

using namespace irlab;

namespace {

ComponentSpace space(std::size_t id, std::size_t n) {
  std::vector<Candidate> c;
  for (std::size_t i = 0; i < n; ++i) c.push_back({"s" + std::to_string(i), double(i)});
  return ComponentSpace(id, std::move(c));
}

Benchmark separable(std::vector<std::vector<double>> costs) {
  std::vector<ComponentSpace> spaces;
  for (std::size_t j = 0; j < costs.size(); ++j) spaces.push_back(space(j, costs[j].size()));
  return Benchmark(std::move(spaces), BenchmarkKind::separable, std::move(costs), {}, 0.0, 0);
}

// Oracle: nested-loop enumeration written independently of the odometer.
double enumerate_min(const Benchmark& b, std::size_t j, PipelineConfig& cfg) {
  if (j == b.components()) return noiseless_loss(b, cfg);
  double best = INFINITY;
  for (std::size_t i = 0; i < b.space(j).size(); ++i) {
    cfg.selections[j] = i;
    best = std::min(best, enumerate_min(b, j + 1, cfg));
  }
  return best;
}

}  // namespace

TEST_CASE("component spaces") {
  CHECK_THROWS_AS(ComponentSpace(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(ComponentSpace(0, {{"a", 0}, {"a", 1}}), std::invalid_argument);
  const ComponentSpace s(2, {{"adam", 0.1}, {"sgd", 0.2}});
  CHECK(s.index_of("sgd") == 1);
  CHECK_THROWS_WITH_AS(s.index_of("rmsprop"), doctest::Contains("component 2"),
                       std::invalid_argument);
  CHECK(hamming_distance({{0, 1, 2}}, {{0, 2, 2}}) == 1);
  CHECK_THROWS_AS(hamming_distance({{0}}, {{0, 1}}), std::invalid_argument);
}

TEST_CASE("evaluate") {
  SUBCASE("sum of table entries") {
    const Benchmark b = separable({{0.5, 0.1}, {0.2, 0.9, 0.4}, {0.3}});
    CHECK(evaluate(b, {{1, 0, 0}}, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(evaluate(b, {{1, 0, 0}}, 1) == evaluate(b, {{1, 0, 0}}, 1));
  }
  SUBCASE("single interaction term") {
    std::vector<ComponentSpace> spaces{space(0, 2), space(1, 2)};
    CouplingTable t{0, 1, {0, 0, 0, 0}};
    t.weights[0 * 2 + 1] = 0.5;
    const Benchmark b(spaces, BenchmarkKind::coupled, {{0, 0}, {0, 0}}, {t}, 0.0, 3);
    CHECK(evaluate(b, {{0, 1}}, 0) == 0.5);
    CHECK(evaluate(b, {{1, 1}}, 0) == 0.0);
  }
  SUBCASE("invalid selection names the component") {
    const Benchmark b = separable({{0.5, 0.1}, {0.2, 0.9, 0.4}});
    CHECK_THROWS_WITH_AS(evaluate(b, {{0, 3}}, 0), doctest::Contains("component 1"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(b.config_from_labels({"s0", "s7"}), doctest::Contains("component 1"),
                         std::invalid_argument);
    CHECK_THROWS_AS(evaluate(b, {{0}}, 0), std::invalid_argument);
    CHECK(b.config_from_labels({"s1", "s2"}) == PipelineConfig{{1, 2}});
  }
  SUBCASE("noise is keyed and centered") {
    const Benchmark b = make_benchmark({2, 3, BenchmarkKind::separable, 0, 0.2, 9});
    const PipelineConfig cfg{{1, 2}};
    CHECK(evaluate(b, cfg, 5) == evaluate(b, cfg, 5));
    CHECK(evaluate(b, cfg, 5) != evaluate(b, cfg, 6));
    double sum = 0.0;
    double sq = 0.0;
    const int n = 4000;
    for (int s = 0; s < n; ++s) {
      const double e = evaluate(b, cfg, static_cast<std::uint64_t>(s)) - noiseless_loss(b, cfg);
      sum += e;
      sq += e * e;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(std::sqrt(sq / n) == doctest::Approx(0.2).epsilon(0.05));
  }
}

TEST_CASE("brute_force_optimum") {
  SUBCASE("separable equals component-wise minima") {
    const Benchmark b = make_benchmark({3, 4, BenchmarkKind::separable, 0, 0, 11});
    CHECK(b.configuration_count() == 64);
    const auto [cfg, loss] = brute_force_optimum(b);
    double expected = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& row = b.costs()[j];
      const auto it = std::min_element(row.begin(), row.end());
      expected += *it;
      CHECK(cfg.selections[j] == static_cast<std::size_t>(it - row.begin()));
    }
    CHECK(loss == doctest::Approx(expected).epsilon(1e-15));
  }
  SUBCASE("single component") {
    const Benchmark b = separable({{0.4, 0.2, 0.7}});
    const auto [cfg, loss] = brute_force_optimum(b);
    CHECK(cfg.selections[0] == 1);
    CHECK(loss == 0.2);
  }
  SUBCASE("coupling overrides component-wise minima") {
    std::vector<ComponentSpace> spaces{space(0, 2), space(1, 2)};
    const Benchmark b(spaces, BenchmarkKind::coupled, {{0, 0.1}, {0, 0.1}},
                      {CouplingTable{0, 1, {1, 0, 0, 0}}}, 0.0, 0);
    const auto [cfg, loss] = brute_force_optimum(b);
    CHECK(cfg == PipelineConfig{{0, 1}});
    CHECK(loss == doctest::Approx(0.1));
  }
  SUBCASE("ties go to the lexicographically smallest") {
    const Benchmark b = separable({{0.3, 0.3}, {0.1, 0.1}});
    CHECK(brute_force_optimum(b).first == PipelineConfig{{0, 0}});
  }
  SUBCASE("matches nested enumeration on coupled instances") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const Benchmark b = make_benchmark({4, 3 + seed % 3, BenchmarkKind::coupled, 0.5, 0, seed});
      PipelineConfig scratch{std::vector<std::size_t>(4, 0)};
      CHECK(brute_force_optimum(b).second == enumerate_min(b, 0, scratch));
    }
  }
  SUBCASE("guards") {
    CHECK_THROWS_AS(brute_force_optimum(make_benchmark({2, 2, BenchmarkKind::separable, 0, 0.1, 1})),
                    std::invalid_argument);
    CHECK_THROWS_AS(brute_force_optimum(make_benchmark({7, 8, BenchmarkKind::separable, 0, 0, 1})),
                    std::invalid_argument);
  }
}

TEST_CASE("make_benchmark") {
  const BenchmarkSpec spec{3, 4, BenchmarkKind::separable, 0, 0, 7};
  const Benchmark a = make_benchmark(spec);
  const Benchmark b = make_benchmark(spec);
  CHECK(a.costs() == b.costs());
  for (const auto& row : a.costs()) {
    for (double v : row) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK(a.couplings().empty());

  const Benchmark full = make_benchmark({3, 4, BenchmarkKind::coupled, 1.0, 0, 7});
  CHECK(full.couplings().size() == 3);
  for (const auto& t : full.couplings()) {
    CHECK(t.weights.size() == 16);
    for (double w : t.weights) CHECK(std::abs(w) <= 0.25);
  }
  CHECK(make_benchmark({5, 2, BenchmarkKind::coupled, 0.5, 0, 1}).couplings().size() == 5);

  const Benchmark tiny = make_benchmark({1, 1, BenchmarkKind::separable, 0, 0, 3});
  CHECK(tiny.configuration_count() == 1);
  CHECK(evaluate(tiny, {{0}}, 0) == tiny.costs()[0][0]);

  CHECK_THROWS_AS(make_benchmark({0, 2, BenchmarkKind::separable, 0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(make_benchmark({2, 2, BenchmarkKind::coupled, 1.5, 0, 1}), std::invalid_argument);
}

TEST_CASE("monotone substitution on separable benchmarks") {
  std::mt19937_64 rng(99);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Benchmark b = make_benchmark({4, 5, BenchmarkKind::separable, 0, 0, seed});
    PipelineConfig cfg{std::vector<std::size_t>(4)};
    for (auto& s : cfg.selections) s = rng() % 5;
    const double base = noiseless_loss(b, cfg);
    for (std::size_t j = 0; j < 4; ++j) {
      for (std::size_t i = 0; i < 5; ++i) {
        if (b.costs()[j][i] > b.costs()[j][cfg.selections[j]]) continue;
        PipelineConfig moved = cfg;
        moved.selections[j] = i;
        CHECK(noiseless_loss(b, moved) <= base);
      }
    }
  }
}
