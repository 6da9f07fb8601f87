#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace irlab {

enum class Command { theory, convex, refine, sim };

std::string_view to_string(Command c);
std::optional<Command> command_from_string(std::string_view text);

inline constexpr int kManifestSchemaVersion = 1;

// Header rows of the CSV artifacts.
inline constexpr std::string_view kRefineCsvHeader =
    "iteration,strategy,component,accepted,failed,loss,best_loss,cum_tokens";
inline constexpr std::string_view kConvexCsvHeader = "t,method,gap,bound";
inline constexpr std::string_view kSimCsvHeader = "t,strategy,gain,cumulative,cum_tokens";
inline constexpr std::string_view kTheoryCsvHeader = "quantity,value";

/// Shortest round-trip decimal form of `v`.
std::string format_real(double v);

/// Raised for malformed or invalid configuration; the message names the
/// offending key and its line when known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParamType { real, integer, text, flag };

// std::monostate marks an optional parameter left unset.
using ParamValue = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::real;
  ParamValue default_value;
  std::vector<std::string> choices;  // allowed values for text parameters
};

const std::vector<ParamSpec>& parameter_schema(Command c);

struct ExperimentConfig {
  Command command = Command::theory;
  // Every schema parameter, in schema order, defaults filled in.
  std::vector<std::pair<std::string, ParamValue>> parameters;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;

  const ParamValue& get(std::string_view name) const;
  double real(std::string_view name) const;
  std::optional<double> optional_real(std::string_view name) const;
  std::int64_t integer(std::string_view name) const;
  std::optional<std::int64_t> optional_integer(std::string_view name) const;
  const std::string& text(std::string_view name) const;
  bool flag(std::string_view name) const;
};

struct ConfigOverrides {
  std::optional<Command> command;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
};

/// A single run, or one run per point of the cartesian product of all
/// list-valued parameters (each with output_dir/point_NNN).
struct SweepPlan {
  std::vector<ExperimentConfig> points;
  std::vector<std::string> swept_keys;
  std::filesystem::path root;

  bool is_sweep() const { return !swept_keys.empty(); }
};

SweepPlan parse_config(std::string_view yaml_text, const ConfigOverrides& overrides = {});
SweepPlan load_config_file(const std::filesystem::path& path,
                           const ConfigOverrides& overrides = {});

/// Fully resolved configuration as YAML.
std::string manifest_yaml(const ExperimentConfig& cfg);

/// Human-readable report of one run.
struct RunResult {
  std::string report;
  std::vector<std::filesystem::path> artifacts;
};

/// Runs one experiment, writing CSV artifacts, report.txt and finally
/// manifest.yaml into cfg.output_dir. Throws on validation or runtime errors.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Runs every point of the plan; a sweep also writes a root manifest last.
std::vector<RunResult> run_plan(const SweepPlan& plan);

/// Command-line entry point: `<binary> <command> --config <path> [--seed N] [--out DIR]`.
int cli_main(int argc, char** argv);

}  // namespace irlab
