#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace irlab {

struct Candidate {
  std::string label;
  double level = 0.0;
};

/// Finite search space of one pipeline component.
class ComponentSpace {
 public:
  ComponentSpace(std::size_t component_id, std::vector<Candidate> candidates);

  std::size_t component_id() const { return component_id_; }
  std::size_t size() const { return candidates_.size(); }
  const std::vector<Candidate>& candidates() const { return candidates_; }
  const Candidate& candidate(std::size_t index) const { return candidates_.at(index); }

  /// Index of the candidate carrying `label`; throws std::invalid_argument.
  std::size_t index_of(std::string_view label) const;

 private:
  std::size_t component_id_;
  std::vector<Candidate> candidates_;
};

/// One selection (candidate index) per component, in pipeline order.
struct PipelineConfig {
  std::vector<std::size_t> selections;

  std::size_t size() const { return selections.size(); }
  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Number of components whose selections differ. Sizes must agree.
std::size_t hamming_distance(const PipelineConfig& a, const PipelineConfig& b);

enum class BenchmarkKind { separable, coupled };

std::string_view to_string(BenchmarkKind kind);
BenchmarkKind benchmark_kind_from_string(std::string_view text);

/// Pairwise interaction between components `first < second`;
/// weights are row-major over (first's candidate, second's candidate).
struct CouplingTable {
  std::size_t first = 0;
  std::size_t second = 0;
  std::vector<double> weights;
};

/// Synthetic pipeline loss: per-component costs plus pairwise couplings plus
/// optional Gaussian evaluation noise.
class Benchmark {
 public:
  Benchmark(std::vector<ComponentSpace> spaces, BenchmarkKind kind,
            std::vector<std::vector<double>> costs, std::vector<CouplingTable> couplings,
            double noise_scale, std::uint64_t seed);

  std::size_t components() const { return spaces_.size(); }
  const std::vector<ComponentSpace>& spaces() const { return spaces_; }
  const ComponentSpace& space(std::size_t j) const { return spaces_.at(j); }
  BenchmarkKind kind() const { return kind_; }
  const std::vector<std::vector<double>>& costs() const { return costs_; }
  const std::vector<CouplingTable>& couplings() const { return couplings_; }
  double noise_scale() const { return noise_scale_; }
  std::uint64_t seed() const { return seed_; }

  /// Product of the component space sizes, saturating at UINT64_MAX.
  std::uint64_t configuration_count() const;

  /// Throws std::invalid_argument naming the first offending component.
  void validate(const PipelineConfig& cfg) const;

  /// Resolves labels to a config; throws naming the offending component.
  PipelineConfig config_from_labels(const std::vector<std::string>& labels) const;
  std::string describe(const PipelineConfig& cfg) const;

 private:
  std::vector<ComponentSpace> spaces_;
  BenchmarkKind kind_;
  std::vector<std::vector<double>> costs_;
  std::vector<CouplingTable> couplings_;
  double noise_scale_;
  std::uint64_t seed_;
};

/// Loss of `cfg`. The noise term is N(0, noise_scale^2) drawn from a generator
/// keyed on (benchmark seed, eval_seed, cfg), so repeated calls agree.
double evaluate(const Benchmark& b, const PipelineConfig& cfg, std::uint64_t eval_seed);

/// Noise-free part of the loss.
double noiseless_loss(const Benchmark& b, const PipelineConfig& cfg);

inline constexpr std::uint64_t kBruteForceLimit = 1'000'000;

/// Exhaustive minimizer over the full product space, noise disabled. Ties go
/// to the lexicographically smallest selection vector.
/// Throws std::invalid_argument when the space exceeds kBruteForceLimit or
/// the benchmark is noisy.
std::pair<PipelineConfig, double> brute_force_optimum(const Benchmark& b);

struct BenchmarkSpec {
  std::size_t components = 1;
  std::size_t candidates_per_component = 1;
  BenchmarkKind kind = BenchmarkKind::separable;
  double coupling_density = 0.0;
  double noise_scale = 0.0;
  std::uint64_t seed = 0;
};

/// Costs uniform in [0, 1]; coupled benchmarks get round(density * C(k,2))
/// seeded pairs with weights uniform in [-0.25, 0.25].
Benchmark make_benchmark(const BenchmarkSpec& spec);

}  // namespace irlab
