#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <yaml-cpp/yaml.h>

#include "irlab/experiment.hpp"

namespace irlab {

std::string_view to_string(Command c) {
  switch (c) {
    case Command::theory: return "theory";
    case Command::convex: return "convex";
    case Command::refine: return "refine";
    case Command::sim: return "sim";
  }
  return "?";
}

std::optional<Command> command_from_string(std::string_view text) {
  for (Command c : {Command::theory, Command::convex, Command::refine, Command::sim}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

ParamSpec real(std::string name, ParamValue def) {
  return {std::move(name), ParamType::real, std::move(def), {}};
}
ParamSpec integer(std::string name, ParamValue def) {
  return {std::move(name), ParamType::integer, std::move(def), {}};
}
ParamSpec text(std::string name, std::string def, std::vector<std::string> choices) {
  return {std::move(name), ParamType::text, std::move(def), std::move(choices)};
}
ParamSpec flag(std::string name, bool def) {
  return {std::move(name), ParamType::flag, def, {}};
}

const ParamValue kUnset{};

}  // namespace

const std::vector<ParamSpec>& parameter_schema(Command c) {
  static const std::vector<ParamSpec> theory{
      real("alpha", 0.3),
      real("beta", 0.1),
      real("gamma", 0.5),
      integer("t_max", std::int64_t{1'000'000}),
      integer("gap_horizon", std::int64_t{10}),
      real("c0", 100.0),
      real("c1", 10.0),
      real("c2", 1.0),
      integer("p", std::int64_t{3}),
      integer("k", std::int64_t{5}),
      real("budget", kUnset),
      real("mu", 1.0),
      real("L", 10.0),
      real("mu1", kUnset),
      real("Lmax", 1.0),
  };
  static const std::vector<ParamSpec> convex{
      integer("dimension", std::int64_t{4}),
      real("condition_number", 50.0),
      integer("iterations", std::int64_t{100}),
      real("mu1", kUnset),
      real("c0", 0.0),
      real("c1", 1.0),
      real("c2", 0.0),
      real("budget", kUnset),
  };
  static const std::vector<ParamSpec> refine{
      integer("components", std::int64_t{5}),
      integer("candidates", std::int64_t{6}),
      text("kind", "coupled", {"separable", "coupled"}),
      real("coupling_density", 0.5),
      real("noise_scale", 0.0),
      integer("benchmark_seed", kUnset),
      text("mode", "iterative", {"iterative", "global"}),
      text("selector", "round_robin", {"round_robin", "uniform_random", "stale_first"}),
      text("proposer", "random_subset", {"exhaustive", "random_subset"}),
      integer("subset_size", std::int64_t{1}),
      text("init_mode", "unified", {"unified", "sequential"}),
      integer("max_iterations", std::int64_t{60}),
      real("failure_rate", 0.0),
      integer("history_cap", std::int64_t{10}),
      flag("global_always_commit", false),
      real("c0", 0.0),
      real("c1", 1.0),
      real("c2", 0.0),
      integer("runs", std::int64_t{1}),
  };
  static const std::vector<ParamSpec> sim{
      real("alpha", 0.3),
      real("beta", 0.1),
      real("gamma", 0.5),
      real("c0", 0.0),
      real("c1", 1.0),
      real("c2", 0.0),
      integer("p", std::int64_t{3}),
      text("mode", "deterministic", {"deterministic", "stochastic"}),
      integer("iterations", kUnset),
      real("budget", kUnset),
      real("loss_floor", kUnset),
      real("failure_rate", 0.0),
      real("failure_rate_global", kUnset),
      real("failure_rate_local", kUnset),
  };
  switch (c) {
    case Command::theory: return theory;
    case Command::convex: return convex;
    case Command::refine: return refine;
    case Command::sim: return sim;
  }
  return theory;
}

const ParamValue& ExperimentConfig::get(std::string_view name) const {
  for (const auto& [key, value] : parameters) {
    if (key == name) return value;
  }
  throw std::logic_error("no parameter '" + std::string(name) + "' for command " +
                         std::string(to_string(command)));
}

double ExperimentConfig::real(std::string_view name) const {
  const auto v = optional_real(name);
  if (!v) throw ConfigError("parameter '" + std::string(name) + "' is required");
  return *v;
}

std::optional<double> ExperimentConfig::optional_real(std::string_view name) const {
  const ParamValue& v = get(name);
  if (std::holds_alternative<std::monostate>(v)) return std::nullopt;
  return std::get<double>(v);
}

std::int64_t ExperimentConfig::integer(std::string_view name) const {
  const auto v = optional_integer(name);
  if (!v) throw ConfigError("parameter '" + std::string(name) + "' is required");
  return *v;
}

std::optional<std::int64_t> ExperimentConfig::optional_integer(std::string_view name) const {
  const ParamValue& v = get(name);
  if (std::holds_alternative<std::monostate>(v)) return std::nullopt;
  return std::get<std::int64_t>(v);
}

const std::string& ExperimentConfig::text(std::string_view name) const {
  return std::get<std::string>(get(name));
}

bool ExperimentConfig::flag(std::string_view name) const {
  return std::get<bool>(get(name));
}

namespace {

std::string where(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) return "";
  return " (line " + std::to_string(mark.line + 1) + ")";
}

ParamValue convert_scalar(const ParamSpec& spec, const YAML::Node& node) {
  const auto fail = [&](std::string_view what) -> ParamValue {
    throw ConfigError("parameter '" + spec.name + "'" + where(node) + ": " + std::string(what));
  };
  if (node.IsNull()) {
    return ParamValue{};
  }
  if (!node.IsScalar()) {
    return fail("expected a scalar value");
  }
  const std::string& raw = node.Scalar();
  switch (spec.type) {
    case ParamType::real: {
      double v = 0.0;
      const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (res.ec != std::errc{} || res.ptr != raw.data() + raw.size() || !std::isfinite(v)) {
        return fail("expected a real number, got '" + raw + "'");
      }
      return v;
    }
    case ParamType::integer: {
      std::int64_t v = 0;
      const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (res.ec != std::errc{} || res.ptr != raw.data() + raw.size()) {
        return fail("expected an integer, got '" + raw + "'");
      }
      return v;
    }
    case ParamType::text: {
      if (!spec.choices.empty() &&
          std::find(spec.choices.begin(), spec.choices.end(), raw) == spec.choices.end()) {
        std::string allowed;
        for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : ", ") + c;
        return fail("'" + raw + "' is not one of " + allowed);
      }
      return raw;
    }
    case ParamType::flag: {
      if (raw == "true") return true;
      if (raw == "false") return false;
      return fail("expected true or false, got '" + raw + "'");
    }
  }
  return fail("unsupported type");
}

std::uint64_t parse_seed(const YAML::Node& node) {
  std::uint64_t v = 0;
  const std::string& raw = node.IsScalar() ? node.Scalar() : std::string();
  const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (raw.empty() || res.ec != std::errc{} || res.ptr != raw.data() + raw.size()) {
    throw ConfigError("key 'seed'" + where(node) + ": expected a non-negative integer");
  }
  return v;
}

std::string point_name(std::size_t i) {
  std::string n = std::to_string(i);
  return "point_" + std::string(n.size() < 3 ? 3 - n.size() : 0, '0') + n;
}

SweepPlan parse_document(std::string_view yaml_text, const ConfigOverrides& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("config parse error at line " + std::to_string(e.mark.line + 1) + ": " +
                      e.msg);
  }
  if (root.IsNull()) {
    root = YAML::Node(YAML::NodeType::Map);
  }
  if (!root.IsMap()) {
    throw ConfigError("config: top level must be a mapping" + where(root));
  }

  std::optional<Command> command = overrides.command;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  YAML::Node params;
  for (const auto& item : root) {
    const std::string key = item.first.as<std::string>();
    if (key == "command") {
      const auto c = command_from_string(item.second.as<std::string>());
      if (!c) {
        throw ConfigError("key 'command'" + where(item.first) + ": unknown command '" +
                          item.second.as<std::string>() + "'");
      }
      if (command && *command != *c) {
        throw ConfigError("key 'command'" + where(item.first) + ": config is for '" +
                          std::string(to_string(*c)) + "' but '" +
                          std::string(to_string(*command)) + "' was requested");
      }
      command = c;
    } else if (key == "seed") {
      seed = parse_seed(item.second);
    } else if (key == "output_dir") {
      output_dir = item.second.as<std::string>();
    } else if (key == "parameters") {
      if (!item.second.IsMap() && !item.second.IsNull()) {
        throw ConfigError("key 'parameters'" + where(item.first) + ": expected a mapping");
      }
      params = item.second;
    } else {
      throw ConfigError("unknown key '" + key + "'" + where(item.first));
    }
  }
  if (!command) {
    throw ConfigError("config: no command given");
  }
  if (overrides.seed) seed = overrides.seed;
  if (overrides.output_dir) output_dir = overrides.output_dir;

  const auto& schema = parameter_schema(*command);
  // Per parameter: the list of values (length 1 unless swept).
  std::vector<std::vector<ParamValue>> values;
  for (const auto& spec : schema) values.push_back({spec.default_value});

  SweepPlan plan;
  if (params && params.IsMap()) {
    for (const auto& item : params) {
      const std::string key = item.first.as<std::string>();
      const auto it = std::find_if(schema.begin(), schema.end(),
                                   [&](const ParamSpec& s) { return s.name == key; });
      if (it == schema.end()) {
        throw ConfigError("unknown parameter '" + key + "'" + where(item.first) + " for command " +
                          std::string(to_string(*command)));
      }
      auto& slot = values[static_cast<std::size_t>(it - schema.begin())];
      slot.clear();
      if (item.second.IsSequence()) {
        if (item.second.size() == 0) {
          throw ConfigError("parameter '" + key + "'" + where(item.first) + ": empty sweep list");
        }
        for (const auto& v : item.second) slot.push_back(convert_scalar(*it, v));
        plan.swept_keys.push_back(key);
      } else {
        slot.push_back(convert_scalar(*it, item.second));
      }
    }
  }

  ExperimentConfig base;
  base.command = *command;
  base.seed = seed.value_or(0);
  base.output_dir = output_dir.value_or("out");
  plan.root = base.output_dir;

  // Cartesian product, earlier schema parameters varying slowest.
  std::size_t total = 1;
  for (const auto& v : values) total *= v.size();
  for (std::size_t n = 0; n < total; ++n) {
    ExperimentConfig cfg = base;
    std::vector<std::size_t> index(schema.size(), 0);
    std::size_t rest = n;
    for (std::size_t i = schema.size(); i-- > 0;) {
      index[i] = rest % values[i].size();
      rest /= values[i].size();
    }
    for (std::size_t i = 0; i < schema.size(); ++i) {
      cfg.parameters.emplace_back(schema[i].name, values[i][index[i]]);
    }
    if (plan.is_sweep()) {
      cfg.output_dir = base.output_dir / point_name(n);
    }
    plan.points.push_back(std::move(cfg));
  }
  return plan;
}

}  // namespace

SweepPlan parse_config(std::string_view yaml_text, const ConfigOverrides& overrides) {
  try {
    return parse_document(yaml_text, overrides);
  } catch (const YAML::Exception& e) {
    // Type conversions of structural keys (e.g. a mapping where a scalar belongs).
    throw ConfigError("config error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

SweepPlan load_config_file(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string manifest_yaml(const ExperimentConfig& cfg) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "schema_version" << YAML::Value << kManifestSchemaVersion;
  out << YAML::Key << "command" << YAML::Value << std::string(to_string(cfg.command));
  out << YAML::Key << "seed" << YAML::Value << cfg.seed;
  out << YAML::Key << "output_dir" << YAML::Value << cfg.output_dir.generic_string();
  out << YAML::Key << "parameters" << YAML::Value << YAML::BeginMap;
  for (const auto& [key, value] : cfg.parameters) {
    out << YAML::Key << key << YAML::Value;
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::monostate>) {
            out << YAML::Null;
          } else if constexpr (std::is_same_v<T, bool>) {
            out << (v ? "true" : "false");
          } else if constexpr (std::is_same_v<T, double>) {
            out << format_real(v);
          } else if constexpr (std::is_same_v<T, std::int64_t>) {
            out << std::to_string(v);
          } else {
            out << v;
          }
        },
        value);
  }
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace irlab
