#include "irlab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

namespace irlab {

namespace {

std::string component_name(std::size_t j) {
  return "component " + std::to_string(j);
}

}  // namespace

ComponentSpace::ComponentSpace(std::size_t component_id, std::vector<Candidate> candidates)
    : component_id_(component_id), candidates_(std::move(candidates)) {
  if (candidates_.empty()) {
    throw std::invalid_argument(component_name(component_id_) + " has no candidates");
  }
  std::set<std::string_view> seen;
  for (const auto& c : candidates_) {
    if (!seen.insert(c.label).second) {
      throw std::invalid_argument(component_name(component_id_) + " repeats candidate label '" +
                                  c.label + "'");
    }
  }
}

std::size_t ComponentSpace::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    if (candidates_[i].label == label) {
      return i;
    }
  }
  throw std::invalid_argument(component_name(component_id_) + ": unknown candidate label '" +
                              std::string(label) + "'");
}

std::size_t hamming_distance(const PipelineConfig& a, const PipelineConfig& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("hamming_distance: configs of different length");
  }
  std::size_t d = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    d += a.selections[j] != b.selections[j] ? 1 : 0;
  }
  return d;
}

std::string_view to_string(BenchmarkKind kind) {
  return kind == BenchmarkKind::separable ? "separable" : "coupled";
}

BenchmarkKind benchmark_kind_from_string(std::string_view text) {
  if (text == "separable") return BenchmarkKind::separable;
  if (text == "coupled") return BenchmarkKind::coupled;
  throw std::invalid_argument("unknown benchmark kind '" + std::string(text) +
                              "' (expected separable or coupled)");
}

Benchmark::Benchmark(std::vector<ComponentSpace> spaces, BenchmarkKind kind,
                     std::vector<std::vector<double>> costs, std::vector<CouplingTable> couplings,
                     double noise_scale, std::uint64_t seed)
    : spaces_(std::move(spaces)),
      kind_(kind),
      costs_(std::move(costs)),
      couplings_(std::move(couplings)),
      noise_scale_(noise_scale),
      seed_(seed) {
  if (spaces_.empty()) {
    throw std::invalid_argument("Benchmark: at least one component is required");
  }
  if (costs_.size() != spaces_.size()) {
    throw std::invalid_argument("Benchmark: cost table count does not match component count");
  }
  for (std::size_t j = 0; j < spaces_.size(); ++j) {
    if (costs_[j].size() != spaces_[j].size()) {
      throw std::invalid_argument("Benchmark: cost table of " + component_name(j) +
                                  " does not match its candidate count");
    }
  }
  if (kind_ == BenchmarkKind::separable && !couplings_.empty()) {
    throw std::invalid_argument("Benchmark: separable benchmarks carry no coupling tables");
  }
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& t : couplings_) {
    if (t.first >= t.second || t.second >= spaces_.size()) {
      throw std::invalid_argument("Benchmark: coupling pair must satisfy first < second < k");
    }
    if (!pairs.emplace(t.first, t.second).second) {
      throw std::invalid_argument("Benchmark: duplicate coupling pair");
    }
    if (t.weights.size() != spaces_[t.first].size() * spaces_[t.second].size()) {
      throw std::invalid_argument("Benchmark: coupling table has the wrong shape");
    }
  }
  if (!(noise_scale_ >= 0.0)) {
    throw std::invalid_argument("Benchmark: noise_scale must be >= 0");
  }
}

std::uint64_t Benchmark::configuration_count() const {
  std::uint64_t n = 1;
  for (const auto& s : spaces_) {
    if (n > std::numeric_limits<std::uint64_t>::max() / s.size()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    n *= s.size();
  }
  return n;
}

void Benchmark::validate(const PipelineConfig& cfg) const {
  if (cfg.size() != spaces_.size()) {
    throw std::invalid_argument("config has " + std::to_string(cfg.size()) +
                                " selections for a " + std::to_string(spaces_.size()) +
                                "-component pipeline");
  }
  for (std::size_t j = 0; j < cfg.size(); ++j) {
    if (cfg.selections[j] >= spaces_[j].size()) {
      throw std::invalid_argument(component_name(j) + ": selection " +
                                  std::to_string(cfg.selections[j]) + " is not a candidate");
    }
  }
}

PipelineConfig Benchmark::config_from_labels(const std::vector<std::string>& labels) const {
  if (labels.size() != spaces_.size()) {
    throw std::invalid_argument("expected " + std::to_string(spaces_.size()) + " labels, got " +
                                std::to_string(labels.size()));
  }
  PipelineConfig cfg;
  cfg.selections.reserve(labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) {
    cfg.selections.push_back(spaces_[j].index_of(labels[j]));
  }
  return cfg;
}

std::string Benchmark::describe(const PipelineConfig& cfg) const {
  validate(cfg);
  std::string out;
  for (std::size_t j = 0; j < cfg.size(); ++j) {
    if (j > 0) out += '|';
    out += spaces_[j].candidate(cfg.selections[j]).label;
  }
  return out;
}

double noiseless_loss(const Benchmark& b, const PipelineConfig& cfg) {
  b.validate(cfg);
  double loss = 0.0;
  for (std::size_t j = 0; j < cfg.size(); ++j) {
    loss += b.costs()[j][cfg.selections[j]];
  }
  for (const auto& t : b.couplings()) {
    const std::size_t cols = b.space(t.second).size();
    loss += t.weights[cfg.selections[t.first] * cols + cfg.selections[t.second]];
  }
  return loss;
}

double evaluate(const Benchmark& b, const PipelineConfig& cfg, std::uint64_t eval_seed) {
  const double loss = noiseless_loss(b, cfg);
  if (b.noise_scale() == 0.0) {
    return loss;
  }
  std::vector<std::uint32_t> key;
  key.reserve(4 + cfg.size());
  for (std::uint64_t v : {b.seed(), eval_seed}) {
    key.push_back(static_cast<std::uint32_t>(v));
    key.push_back(static_cast<std::uint32_t>(v >> 32));
  }
  for (std::size_t s : cfg.selections) {
    key.push_back(static_cast<std::uint32_t>(s));
  }
  std::seed_seq seq(key.begin(), key.end());
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> noise(0.0, b.noise_scale());
  return loss + noise(rng);
}

std::pair<PipelineConfig, double> brute_force_optimum(const Benchmark& b) {
  if (b.noise_scale() > 0.0) {
    throw std::invalid_argument("brute_force_optimum: benchmark is noisy (noise_scale > 0)");
  }
  const std::uint64_t total = b.configuration_count();
  if (total > kBruteForceLimit) {
    throw std::invalid_argument("brute_force_optimum: " + std::to_string(total) +
                                " configurations exceed the enumeration cap of " +
                                std::to_string(kBruteForceLimit));
  }
  PipelineConfig cfg{std::vector<std::size_t>(b.components(), 0)};
  PipelineConfig best = cfg;
  double best_loss = noiseless_loss(b, cfg);
  // Odometer over selections, last component fastest: lexicographic order.
  for (std::uint64_t n = 1; n < total; ++n) {
    for (std::size_t j = cfg.size(); j-- > 0;) {
      if (++cfg.selections[j] < b.space(j).size()) {
        break;
      }
      cfg.selections[j] = 0;
    }
    const double loss = noiseless_loss(b, cfg);
    if (loss < best_loss) {
      best_loss = loss;
      best = cfg;
    }
  }
  return {best, best_loss};
}

Benchmark make_benchmark(const BenchmarkSpec& spec) {
  if (spec.components < 1 || spec.candidates_per_component < 1) {
    throw std::invalid_argument("make_benchmark: need k >= 1 and candidates_per_component >= 1");
  }
  if (!(spec.coupling_density >= 0.0 && spec.coupling_density <= 1.0)) {
    throw std::invalid_argument("make_benchmark: coupling_density must lie in [0, 1]");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<ComponentSpace> spaces;
  std::vector<std::vector<double>> costs(spec.components);
  for (std::size_t j = 0; j < spec.components; ++j) {
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < spec.candidates_per_component; ++i) {
      candidates.push_back({"c" + std::to_string(i), static_cast<double>(i)});
      costs[j].push_back(unit(rng));
    }
    spaces.emplace_back(j, std::move(candidates));
  }

  std::vector<CouplingTable> couplings;
  if (spec.kind == BenchmarkKind::coupled) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < spec.components; ++a) {
      for (std::size_t b = a + 1; b < spec.components; ++b) {
        pairs.emplace_back(a, b);
      }
    }
    const auto chosen =
        static_cast<std::size_t>(std::llround(spec.coupling_density * pairs.size()));
    std::shuffle(pairs.begin(), pairs.end(), rng);
    pairs.resize(chosen);
    std::sort(pairs.begin(), pairs.end());
    std::uniform_real_distribution<double> weight(-0.25, 0.25);
    const std::size_t n = spec.candidates_per_component;
    for (const auto& [a, b] : pairs) {
      CouplingTable t{a, b, std::vector<double>(n * n)};
      for (double& w : t.weights) {
        w = weight(rng);
      }
      couplings.push_back(std::move(t));
    }
  }
  return Benchmark(std::move(spaces), spec.kind, std::move(costs), std::move(couplings),
                   spec.noise_scale, spec.seed);
}

}  // namespace irlab
