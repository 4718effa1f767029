#include "epr/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <thread>

#include <CLI11.hpp>

#include "epr/harness.hpp"
#include "epr/metrics.hpp"
#include "epr/plot.hpp"
#include "epr/quantum_target.hpp"
#include "epr/scenario.hpp"
#include "epr/training.hpp"
#include "epr/util.hpp"

namespace epr {

namespace {

namespace fs = std::filesystem;

int default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(std::min(hc, 16u));
}

ScenarioConfig load_config(const std::string& path) {
  ScenarioConfig cfg =
      path.empty() ? parse_scenario("{}") : load_scenario_file(path);
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
  return cfg;
}

std::vector<std::string> provenance_for(const std::string& command,
                                        const ScenarioConfig& cfg,
                                        std::uint64_t seed) {
  return {"eprlab v" + std::string(kVersion), "command: " + command,
          "config_hash: " + scenario_hash(cfg), "seed: " + std::to_string(seed)};
}

std::string out_path(const std::string& dir, const char* name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

MetricsReport evaluate_histogram(const JointHistogram& hist,
                                 const ScenarioConfig& cfg,
                                 std::uint64_t seed) {
  MetricsReport rep;
  const auto emp = empirical_distribution(hist);
  const auto target = target_histogram(cfg.state, cfg.angles());
  rep.chsh = chsh_value(emp);
  rep.comparison = compare_histograms(emp, target);
  rep.skip_rate = hist.skip_rate();
  rep.runs = hist.runs;
  rep.seed = seed;
  return rep;
}

void print_metrics(const MetricsReport& rep) {
  std::cout << "S (minus on E11) = " << format_double(rep.chsh.s) << "\n";
  std::cout << "max |S| over sign placements = "
            << format_double(rep.chsh.abs_s_max)
            << (rep.chsh.violates_bell ? "  -> violates the Bell inequality"
                                       : "  -> within the classical bound")
            << "\n";
  std::cout << "KL(empirical || target) = " << format_double(rep.comparison.kl)
            << ", TV = " << format_double(rep.comparison.tv)
            << ", max cell deviation = "
            << format_double(rep.comparison.worst_abs_diff) << " at "
            << cell_label(rep.comparison.worst_cell) << "\n";
  std::cout << "skip rate = " << format_double(rep.skip_rate) << " over "
            << rep.runs << " runs\n";
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"deterministic EPR game workbench (train, simulate, evaluate)"};
  app.require_subcommand(1);

  std::string scenario_path, checkpoint_path, histogram_path;
  std::string out_dir = ".";
  std::int64_t runs = -1, steps = -1;
  std::int64_t seed = -1;
  int workers = default_workers();
  bool quick = false;

  auto add_common = [&](CLI::App* cmd, bool with_workers = true) {
    cmd->add_option("--scenario", scenario_path,
                    "scenario JSON file (defaults apply when omitted)");
    cmd->add_option("--out", out_dir, "output directory (default: .)");
    if (with_workers) {
      cmd->add_option("--workers", workers, "parallel workers");
    }
  };

  CLI::App* target_cmd = app.add_subcommand(
      "target", "emit the Born-rule target distribution CSV");
  add_common(target_cmd, false);

  CLI::App* train_cmd =
      app.add_subcommand("train", "fit reward parameters against the target");
  add_common(train_cmd);
  train_cmd->add_option("--steps", steps, "training steps (overrides file)");
  train_cmd->add_option("--seed", seed, "training seed (overrides file)");
  train_cmd->add_option("--checkpoint", checkpoint_path,
                        "resume from this checkpoint");

  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "hard deterministic runs from a trained checkpoint");
  add_common(sim_cmd);
  sim_cmd->add_option("--checkpoint", checkpoint_path, "trained checkpoint")
      ->required();
  sim_cmd->add_option("--runs", runs, "number of runs (overrides file)");
  sim_cmd->add_option("--seed", seed, "run seed (overrides file)");

  CLI::App* eval_cmd = app.add_subcommand(
      "evaluate", "compare empirical statistics against the Born target");
  add_common(eval_cmd);
  eval_cmd->add_option("--checkpoint", checkpoint_path,
                       "trained checkpoint (simulates internally)");
  eval_cmd->add_option("--histogram", histogram_path,
                       "precomputed histogram CSV (skips simulation)");
  eval_cmd->add_option("--runs", runs, "number of runs (overrides file)");
  eval_cmd->add_option("--seed", seed, "run seed (overrides file)");

  CLI::App* plot_cmd = app.add_subcommand(
      "plot", "paired-bar CSV + SVG of empirical vs target histograms");
  add_common(plot_cmd, false);
  plot_cmd->add_option("--histogram", histogram_path, "histogram CSV")
      ->required();

  CLI::App* selftest_cmd =
      app.add_subcommand("selftest", "run the oracle/property suites");
  selftest_cmd->add_flag("--quick", quick, "reduced sample counts");

  try {
    // CLI11 takes the argument vector in reverse order, program name excluded.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (workers < 1) throw InputError("workers must be >= 1");

    if (target_cmd->parsed()) {
      const ScenarioConfig cfg = load_config(scenario_path);
      const auto target = target_histogram(cfg.state, cfg.angles());
      const std::string path = out_path(out_dir, "target.csv");
      write_target_csv(path, target, provenance_for("target", cfg, 0));
      const auto chsh = chsh_value(target.cells);
      std::cout << "wrote " << path << "\n";
      std::cout << "target max |S| = " << format_double(chsh.abs_s_max) << "\n";
      return 0;
    }

    if (train_cmd->parsed()) {
      ScenarioConfig cfg = load_config(scenario_path);
      if (steps >= 0) {
        cfg.train.steps = steps;
        cfg.train.temperature.total_steps = steps;
      }
      if (seed >= 0) cfg.train.seed = static_cast<std::uint64_t>(seed);
      TrainPaths paths;
      paths.checkpoint = out_path(out_dir, "checkpoint.txt");
      paths.loss_csv = out_path(out_dir, "loss_history.csv");
      TrainState resume;
      const TrainState* resume_ptr = nullptr;
      if (!checkpoint_path.empty()) {
        resume = state_from_checkpoint(read_checkpoint(checkpoint_path), cfg);
        resume_ptr = &resume;
      }
      const TrainState final_state = train(cfg, paths, workers, resume_ptr);
      std::cout << "trained " << final_state.step << " steps; final loss = "
                << format_double(final_state.history.empty()
                                     ? 0.0
                                     : final_state.history.back().loss)
                << "\n";
      if (final_state.model.kind == RewardKind::Ansatz) {
        const double deg = final_state.model.params.values[0] * 180.0 /
                           std::numbers::pi;
        std::cout << "learned offset = " << format_double(deg) << " deg\n";
      }
      std::cout << "wrote " << paths.checkpoint << " and " << paths.loss_csv
                << "\n";
      return 0;
    }

    if (sim_cmd->parsed() || eval_cmd->parsed()) {
      ScenarioConfig cfg = load_config(scenario_path);
      if (runs >= 0) cfg.run.runs = runs;  // validated below
      if (seed >= 0) cfg.run.seed = static_cast<std::uint64_t>(seed);
      if (cfg.run.runs < 1) throw InputError("runs must be >= 1");

      JointHistogram hist;
      if (eval_cmd->parsed() && !histogram_path.empty()) {
        if (!checkpoint_path.empty()) {
          throw InputError("pass either --checkpoint or --histogram, not both");
        }
        hist = read_histogram_csv(histogram_path);
      } else {
        if (checkpoint_path.empty()) {
          throw InputError("a --checkpoint (or --histogram) is required");
        }
        const Checkpoint cp = read_checkpoint(checkpoint_path);
        hist = hard_run_histogram(cp.model, cfg, cfg.run.runs, cfg.run.seed,
                                  workers);
        const std::string hist_path = out_path(out_dir, "histogram.csv");
        write_histogram_csv(hist_path, hist,
                            provenance_for(sim_cmd->parsed() ? "simulate"
                                                             : "evaluate",
                                           cfg, cfg.run.seed));
        std::cout << "wrote " << hist_path << "\n";
      }

      if (sim_cmd->parsed()) {
        std::cout << "runs = " << hist.runs
                  << ", skip rate = " << format_double(hist.skip_rate()) << "\n";
        return 0;
      }
      const MetricsReport rep = evaluate_histogram(hist, cfg, cfg.run.seed);
      const std::string metrics_path = out_path(out_dir, "metrics.json");
      write_metrics_json(metrics_path, rep, scenario_hash(cfg));
      print_metrics(rep);
      std::cout << "wrote " << metrics_path << "\n";
      return 0;
    }

    if (plot_cmd->parsed()) {
      const ScenarioConfig cfg = load_config(scenario_path);
      const JointHistogram hist = read_histogram_csv(histogram_path);
      const auto emp = empirical_distribution(hist);
      const auto target = target_histogram(cfg.state, cfg.angles());
      const std::string csv = out_path(out_dir, "plot.csv");
      const std::string svg = out_path(out_dir, "plot.svg");
      emit_plot_data(emp, target.cells, csv, svg,
                     provenance_for("plot", cfg, 0));
      std::cout << "wrote " << csv << " and " << svg << "\n";
      return 0;
    }

    if (selftest_cmd->parsed()) {
      const SelftestReport rep = run_selftests(quick, std::cout);
      std::cout << rep.passed << " passed, " << rep.failed << " failed\n";
      return rep.failed == 0 ? 0 : 2;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace epr
