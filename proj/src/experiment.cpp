#include "irlab/experiment.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "irlab/convex_lab.hpp"
#include "irlab/gain_sim.hpp"
#include "irlab/pipeline.hpp"
#include "irlab/refine.hpp"
#include "irlab/theory.hpp"

namespace irlab {

namespace {

namespace fs = std::filesystem;

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
    if (!out.flush()) {
      throw std::runtime_error("write failed for " + path.string());
    }
    written_.push_back(path);
  }

  std::vector<fs::path> take() { return std::move(written_); }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

// Long-format quantity,value table.
class QuantityTable {
 public:
  void add(const std::string& quantity, double value) { add(quantity, format_real(value)); }
  void add(const std::string& quantity, std::int64_t value) {
    add(quantity, std::to_string(value));
  }
  void add(const std::string& quantity, bool value) { add(quantity, std::string(value ? "true" : "false")); }
  void add(const std::string& quantity, const std::string& value) {
    body_ << quantity << ',' << value << '\n';
  }
  void add_optional(const std::string& quantity, std::optional<double> value) {
    add(quantity, value ? format_real(*value) : std::string("absent"));
  }

  std::string str() const { return std::string(kTheoryCsvHeader) + "\n" + body_.str(); }

 private:
  std::ostringstream body_;
};

std::string verdict(bool holds) { return holds ? "holds" : "fails"; }

RunResult run_theory(const ExperimentConfig& cfg, Artifacts& files) {
  const GainModel g(cfg.real("alpha"), cfg.real("gamma"), cfg.real("beta"));
  const int p = static_cast<int>(cfg.integer("p"));
  const CostModel c(cfg.real("c0"), cfg.real("c1"), cfg.real("c2"), p);
  const std::int64_t k = cfg.integer("k");
  const std::int64_t horizon = cfg.integer("gap_horizon");
  if (horizon < 0) throw ConfigError("parameter 'gap_horizon' must be >= 0");

  QuantityTable table;
  std::ostringstream report;
  report << "theory: alpha=" << format_real(g.alpha()) << " beta=" << format_real(g.beta())
         << " gamma=" << format_real(g.gamma()) << "\n";

  for (std::int64_t t = 0; t <= horizon; ++t) {
    table.add("cumulative_gap_t" + std::to_string(t), cumulative_gap(t, g));
  }
  for (std::int64_t t = 0; t <= horizon; ++t) {
    table.add("gap_difference_t" + std::to_string(t), gap_difference(t, g));
  }
  table.add("monotone_threshold", monotone_threshold(g));

  const Crossover cross = crossover_point(g, cfg.integer("t_max"));
  if (cross.integer_t_star) {
    table.add("integer_t_star", *cross.integer_t_star);
    report << "crossover: T*=" << *cross.integer_t_star;
  } else {
    table.add("integer_t_star", std::string("absent"));
    report << "crossover: T* absent within T_max=" << cfg.integer("t_max");
  }
  table.add_optional("continuous_root", cross.continuous_root);
  report << ", continuous root "
         << (cross.continuous_root ? format_real(*cross.continuous_root) : "absent") << "\n";

  const double global_cost = cost_total(Strategy::global, k, c);
  const double local_cost = cost_total(Strategy::local, k, c);
  table.add("cost_total_global", global_cost);
  table.add("cost_total_local", local_cost);
  table.add("effective_step_ratio", effective_step_ratio(k, c));
  report << "cost at k=" << k << ": global " << format_real(global_cost) << ", local "
         << format_real(local_cost) << ", ratio " << format_real(effective_step_ratio(k, c))
         << "\n";

  if (const auto budget = cfg.optional_real("budget")) {
    for (Strategy s : {Strategy::global, Strategy::local}) {
      const std::string name = "steps_within_budget_" + std::string(to_string(s));
      try {
        const auto n = steps_within_budget(s, *budget, c);
        table.add(name, n);
        report << name << ": " << n << "\n";
      } catch (const std::exception& e) {
        table.add(name, std::string("absent"));
        report << name << ": absent (" << e.what() << ")\n";
      }
    }
  }

  const double mu = cfg.real("mu");
  const auto mu1 = cfg.optional_real("mu1");
  const RatePair rates = mu1 ? RatePair(mu, cfg.real("L"), *mu1, cfg.real("Lmax"))
                             : RatePair::with_default_mu1(mu, cfg.real("L"), cfg.real("Lmax"), p);
  table.add("mu1", rates.mu1());
  table.add("rate_global", rates.global_rate());
  table.add("rate_local", rates.local_rate());
  table.add("rate_bound_global_k", rate_bound(rates.global_rate(), k, 1.0));
  table.add("rate_bound_local_k", rate_bound(rates.local_rate(), k, 1.0));
  try {
    const ConditionReport cond = superiority_condition(c, rates, k);
    table.add("lhs_lemma", cond.lhs_lemma);
    table.add("rhs", cond.rhs);
    table.add("holds_as_stated", cond.holds_as_stated);
    table.add("lhs_reciprocal", cond.lhs_reciprocal);
    table.add("holds_reciprocal", cond.holds_reciprocal);
    report << "superiority: lhs " << format_real(cond.lhs_lemma) << " vs rhs "
           << format_real(cond.rhs) << " -> " << verdict(cond.holds_as_stated)
           << "; reciprocal lhs " << format_real(cond.lhs_reciprocal) << " -> "
           << verdict(cond.holds_reciprocal) << "\n";
  } catch (const std::domain_error& e) {
    for (const char* q : {"lhs_lemma", "rhs", "holds_as_stated", "lhs_reciprocal",
                          "holds_reciprocal"}) {
      table.add(q, std::string("undefined"));
    }
    report << "superiority: undefined (" << e.what() << ")\n";
  }

  files.write("theory.csv", table.str());
  return {report.str(), {}};
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    stream};
  std::uint64_t out[1];
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  out[0] = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out[0];
}

void append_convex_rows(std::ostringstream& csv, const std::string& method,
                        const OptTrajectory& traj) {
  const double gap0 = traj.iterates.front().gap;
  for (const auto& it : traj.iterates) {
    csv << it.t << ',' << method << ',' << format_real(it.gap) << ','
        << format_real(rate_bound(traj.rate_used, it.t, gap0)) << '\n';
  }
}

RunResult run_convex(const ExperimentConfig& cfg, Artifacts& files) {
  const std::int64_t d = cfg.integer("dimension");
  if (d < 1 || d > 512) throw ConfigError("parameter 'dimension' must lie in [1, 512]");
  const std::int64_t steps = cfg.integer("iterations");
  if (steps < 0) throw ConfigError("parameter 'iterations' must be >= 0");

  const QuadraticProblem problem =
      random_spd_problem(d, cfg.real("condition_number"), derived_seed(cfg.seed, 1));
  const Eigen::VectorXd x0 = random_point(d, derived_seed(cfg.seed, 2));
  const auto mu1 = cfg.optional_real("mu1");

  const OptTrajectory gd = run_gd(problem, x0, steps);
  const OptTrajectory gs = run_gs_cd(problem, x0, steps, mu1);
  std::ostringstream csv;
  csv << kConvexCsvHeader << '\n';
  append_convex_rows(csv, "gd", gd);
  append_convex_rows(csv, "gs", gs);
  files.write("convex.csv", csv.str());

  std::ostringstream report;
  report << "convex: d=" << d << " mu=" << format_real(problem.mu())
         << " L=" << format_real(problem.smoothness()) << " Lmax=" << format_real(problem.lmax())
         << "\n";
  report << "gd: gap " << format_real(gd.iterates.back().gap) << " after " << steps
         << " steps (rate " << format_real(gd.rate_used) << ")\n";
  report << "gs: gap " << format_real(gs.iterates.back().gap) << " after " << steps
         << " steps (rate " << format_real(gs.rate_used) << ")\n";

  if (const auto budget = cfg.optional_real("budget")) {
    const CostModel c(cfg.real("c0"), cfg.real("c1"), cfg.real("c2"), static_cast<int>(d));
    const ComparisonReport cmp = budget_matched_compare(problem, c, *budget, x0, mu1);
    QuantityTable table;
    table.add("steps_global", cmp.steps_global);
    table.add("steps_local", cmp.steps_local);
    table.add("initial_gap", cmp.initial_gap);
    table.add("gd_final_gap", cmp.gd_final_gap);
    table.add("gs_final_gap", cmp.gs_final_gap);
    table.add("gd_bound", cmp.gd_bound);
    table.add("gs_bound", cmp.gs_bound);
    table.add("local_wins", cmp.local_wins());
    if (cmp.condition) {
      table.add("lhs_lemma", cmp.condition->lhs_lemma);
      table.add("rhs", cmp.condition->rhs);
      table.add("holds_as_stated", cmp.condition->holds_as_stated);
      table.add("lhs_reciprocal", cmp.condition->lhs_reciprocal);
      table.add("holds_reciprocal", cmp.condition->holds_reciprocal);
    }
    files.write("comparison.csv", table.str());
    report << "budget " << format_real(*budget) << ": gd " << cmp.steps_global << " steps gap "
           << format_real(cmp.gd_final_gap) << ", gs " << cmp.steps_local << " steps gap "
           << format_real(cmp.gs_final_gap) << " -> " << (cmp.local_wins() ? "gs" : "gd")
           << " wins\n";
  }
  return {report.str(), {}};
}

std::string run_file_name(std::int64_t run) {
  std::string n = std::to_string(run);
  return "trajectory_" + std::string(n.size() < 3 ? 3 - n.size() : 0, '0') + n + ".csv";
}

RunResult run_refine(const ExperimentConfig& cfg, Artifacts& files) {
  const auto positive = [&](const char* name) {
    const std::int64_t v = cfg.integer(name);
    if (v < 1) throw ConfigError(std::string("parameter '") + name + "' must be >= 1");
    return v;
  };
  BenchmarkSpec spec;
  spec.components = static_cast<std::size_t>(positive("components"));
  spec.candidates_per_component = static_cast<std::size_t>(positive("candidates"));
  spec.kind = benchmark_kind_from_string(cfg.text("kind"));
  spec.coupling_density = cfg.real("coupling_density");
  spec.noise_scale = cfg.real("noise_scale");
  spec.seed = static_cast<std::uint64_t>(
      cfg.optional_integer("benchmark_seed").value_or(static_cast<std::int64_t>(cfg.seed)));
  const Benchmark bench = make_benchmark(spec);

  StrategyConfig strategy;
  strategy.mode = update_mode_from_string(cfg.text("mode"));
  strategy.selector = selector_from_string(cfg.text("selector"));
  strategy.proposer = proposer_from_string(cfg.text("proposer"));
  strategy.subset_size = static_cast<std::size_t>(positive("subset_size"));
  strategy.init_mode = init_mode_from_string(cfg.text("init_mode"));
  strategy.max_iterations = positive("max_iterations");
  strategy.failure_rate = cfg.real("failure_rate");
  strategy.history_cap = positive("history_cap");
  strategy.global_always_commit = cfg.flag("global_always_commit");
  strategy.c0 = cfg.real("c0");
  strategy.c1 = cfg.real("c1");
  strategy.c2 = cfg.real("c2");
  strategy.validate();
  const std::int64_t runs = positive("runs");

  std::optional<double> oracle;
  std::string oracle_note;
  try {
    oracle = brute_force_optimum(bench).second;
  } catch (const std::invalid_argument& e) {
    oracle_note = e.what();
  }

  const std::string label(to_string(strategy.mode));
  std::ostringstream summary;
  summary << "run,seed,strategy,final_loss,oracle_loss,gap_to_oracle,accepted,failed,cum_tokens,"
             "evaluations\n";
  std::ostringstream report;
  report << "refine: " << label << " on " << to_string(spec.kind) << " benchmark, k="
         << spec.components << ", " << spec.candidates_per_component << " candidates, "
         << runs << " run(s)\n";
  if (!oracle) report << "oracle unavailable: " << oracle_note << "\n";

  for (std::int64_t r = 0; r < runs; ++r) {
    strategy.seed = cfg.seed + static_cast<std::uint64_t>(r);
    const Trajectory traj = run(bench, strategy);

    std::ostringstream csv;
    csv << kRefineCsvHeader << '\n';
    csv << 0 << ',' << label << ",init,1,0," << format_real(traj.initial_loss) << ','
        << format_real(traj.initial_loss) << ',' << format_real(traj.initial_tokens) << '\n';
    for (const auto& e : traj.entries) {
      csv << e.iteration << ',' << label << ','
          << (e.component ? std::to_string(*e.component) : std::string("all")) << ','
          << (e.accepted ? 1 : 0) << ',' << (e.failed ? 1 : 0) << ','
          << (e.loss_observed ? format_real(*e.loss_observed) : std::string()) << ','
          << format_real(e.best_loss) << ',' << format_real(e.cum_tokens) << '\n';
    }
    files.write(run_file_name(r), csv.str());

    summary << r << ',' << strategy.seed << ',' << label << ','
            << format_real(traj.final_best_loss) << ','
            << (oracle ? format_real(*oracle) : std::string()) << ','
            << (oracle ? format_real(traj.final_best_loss - *oracle) : std::string()) << ','
            << traj.accepted_count() << ',' << traj.failed_count() << ','
            << format_real(traj.cumulative_cost) << ',' << traj.evaluations << '\n';
    report << "run " << r << ": final loss " << format_real(traj.final_best_loss);
    if (oracle) report << " (oracle " << format_real(*oracle) << ")";
    report << ", accepted " << traj.accepted_count() << ", failed " << traj.failed_count()
           << ", tokens " << format_real(traj.cumulative_cost) << "\n";
  }
  files.write("summary.csv", summary.str());
  return {report.str(), {}};
}

RunResult run_sim(const ExperimentConfig& cfg, Artifacts& files) {
  const GainModel g(cfg.real("alpha"), cfg.real("gamma"), cfg.real("beta"));
  const CostModel c(cfg.real("c0"), cfg.real("c1"), cfg.real("c2"),
                    static_cast<int>(cfg.integer("p")));
  SimConfig sc;
  sc.mode = gain_mode_from_string(cfg.text("mode"));
  sc.horizon.iterations = cfg.optional_integer("iterations");
  sc.horizon.budget = cfg.optional_real("budget");
  if (sc.horizon.iterations.has_value() == sc.horizon.budget.has_value()) {
    throw ConfigError("sim: set exactly one of 'iterations' or 'budget'");
  }
  sc.loss_floor = cfg.optional_real("loss_floor");
  const double rate = cfg.real("failure_rate");
  sc.failure_rate_global = cfg.optional_real("failure_rate_global").value_or(rate);
  sc.failure_rate_local = cfg.optional_real("failure_rate_local").value_or(rate);
  sc.seed = cfg.seed;

  const auto [global_t, local_t] = simulate(g, c, sc);
  std::ostringstream csv;
  csv << kSimCsvHeader << '\n';
  for (const GainTrajectory* t : {&global_t, &local_t}) {
    for (std::size_t i = 0; i < t->steps(); ++i) {
      csv << (i + 1) << ',' << to_string(t->strategy) << ',' << format_real(t->gains[i]) << ','
          << format_real(t->cumulative[i]) << ',' << format_real(t->token_costs[i]) << '\n';
    }
  }
  files.write("sim.csv", csv.str());

  const auto empirical = crossover_empirical(global_t, local_t);
  std::ostringstream report;
  report << "sim: " << to_string(sc.mode) << ", global " << global_t.steps() << " steps, local "
         << local_t.steps() << " steps\n";
  report << "empirical crossover: "
         << (empirical ? "T=" + std::to_string(*empirical) : std::string("absent")) << "\n";
  const Crossover theory_cross = crossover_point(g);
  report << "theory crossover: "
         << (theory_cross.integer_t_star ? "T*=" + std::to_string(*theory_cross.integer_t_star)
                                         : std::string("absent"))
         << "\n";
  return {report.str(), {}};
}

bool use_color() {
  return std::getenv("NO_COLOR") == nullptr && ::isatty(STDOUT_FILENO) != 0 &&
         ::isatty(STDERR_FILENO) != 0;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  Artifacts files(cfg.output_dir);
  RunResult result;
  switch (cfg.command) {
    case Command::theory: result = run_theory(cfg, files); break;
    case Command::convex: result = run_convex(cfg, files); break;
    case Command::refine: result = run_refine(cfg, files); break;
    case Command::sim: result = run_sim(cfg, files); break;
  }
  files.write("report.txt", result.report);
  files.write("manifest.yaml", manifest_yaml(cfg));
  result.artifacts = files.take();
  return result;
}

std::vector<RunResult> run_plan(const SweepPlan& plan) {
  std::vector<RunResult> results;
  for (const auto& point : plan.points) {
    results.push_back(run_experiment(point));
  }
  if (plan.is_sweep()) {
    std::ostringstream root;
    root << "schema_version: " << kManifestSchemaVersion << "\n";
    root << "swept:\n";
    for (const auto& key : plan.swept_keys) root << "  - " << key << "\n";
    root << "points:\n";
    for (const auto& point : plan.points) {
      root << "  - " << point.output_dir.filename().generic_string() << "\n";
    }
    Artifacts files(plan.root);
    files.write("manifest.yaml", root.str());
  }
  return results;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Iterative refinement lab: theory calculators, convex testbed, pipeline "
               "refinement and gain simulation"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  for (Command c : {Command::theory, Command::convex, Command::refine, Command::sim}) {
    auto* sub = app.add_subcommand(std::string(to_string(c)), "run the " +
                                                                  std::string(to_string(c)) +
                                                                  " experiment");
    sub->add_option("--config", config_path, "YAML experiment config")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out, "override the output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const bool color = use_color();
  const auto tag = [&](const char* text, const char* code) {
    return color ? std::string("\033[") + code + "m" + text + "\033[0m" : std::string(text);
  };
  ConfigOverrides overrides;
  overrides.command = command_from_string(app.get_subcommands().front()->get_name());
  overrides.seed = seed;
  if (out) overrides.output_dir = *out;
  try {
    const SweepPlan plan = load_config_file(config_path, overrides);
    const auto results = run_plan(plan);
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (plan.is_sweep()) {
        std::cout << tag("==", "1") << ' ' << plan.points[i].output_dir.generic_string() << '\n';
      }
      std::cout << results[i].report;
    }
    std::cout << tag("ok", "32") << ": wrote " << plan.root.generic_string() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << tag("error", "31") << ": " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << tag("error", "31") << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << tag("error", "31") << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace irlab
