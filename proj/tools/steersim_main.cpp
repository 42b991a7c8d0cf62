#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "steersim/harness.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct RunCliArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> arms;
  long runs = 0;
  long horizon = 0;
  long stride = 0;
  std::int64_t seed = -1;
  int threads = 0;
  bool force = false;
  bool dump_traces = false;
};

int do_run(const RunCliArgs& args) {
  steersim::ExperimentConfig cfg = steersim::load_config_file(args.config_path);
  if (args.runs > 0) cfg.runs = static_cast<int>(args.runs);
  if (args.horizon > 0) cfg.horizon = args.horizon;
  if (args.stride > 0) cfg.stride = args.stride;
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (!args.arms.empty()) {
    for (const std::string& arm : args.arms)
      if (arm != "regular" && arm != "se")
        throw steersim::ConfigError("--arms entries must be regular or se");
    cfg.arms = args.arms;
  }

  steersim::RunOptions options;
  options.num_threads = args.threads;
  options.dump_traces = args.dump_traces;
  options.trace_dir = args.out_dir;
  options.force = args.force;

  steersim::ExperimentResult result = steersim::run_experiment(cfg, options);
  steersim::emit_plot_data(result, args.out_dir, args.force);
  std::string arm_names;
  for (const auto& t : result.arms) {
    if (!arm_names.empty()) arm_names += ",";
    arm_names += t.arm;
  }
  std::cout << "wrote " << args.out_dir << "/" << cfg.name << "_{" << arm_names
            << ",combined}.csv and " << cfg.name << "_meta.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steersim: repeated Bayesian investment games with steered "
               "no-regret learners"};
  app.require_subcommand(1);

  RunCliArgs run_args;
  CLI::App* run = app.add_subcommand(
      "run", "run an experiment and emit plot data");
  run->add_option("--config", run_args.config_path, "JSON experiment config")
      ->required();
  run->add_option("--runs", run_args.runs, "override the number of runs");
  run->add_option("--horizon", run_args.horizon, "override the horizon T");
  run->add_option("--seed", run_args.seed, "override the base seed");
  run->add_option("--arms", run_args.arms, "override the arms to run")
      ->delimiter(',');
  run->add_option("--out", run_args.out_dir, "output directory");
  run->add_option("--stride", run_args.stride, "thin CSV rows to every K-th");
  run->add_option("--threads", run_args.threads, "worker thread count");
  run->add_flag("--force", run_args.force, "overwrite existing outputs");
  run->add_flag("--dump-traces", run_args.dump_traces,
                "also write one trace CSV per run");

  std::string solve_config;
  CLI::App* solve = app.add_subcommand(
      "solve", "print the mediator's equilibrium as JSON");
  solve->add_option("--config", solve_config, "JSON experiment config")
      ->required();

  std::string classify_config;
  CLI::App* classify = app.add_subcommand(
      "classify", "print steerability verdicts for the configured game");
  classify->add_option("--config", classify_config, "JSON experiment config")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (run->parsed()) return do_run(run_args);
    if (solve->parsed()) {
      steersim::ExperimentConfig cfg = steersim::load_config_file(solve_config);
      std::cout << steersim::solution_to_json(steersim::resolve_se(cfg)).dump(2)
                << "\n";
      return 0;
    }
    if (classify->parsed()) {
      steersim::ExperimentConfig cfg =
          steersim::load_config_file(classify_config);
      std::cout << steersim::classify_to_json(cfg.params).dump(2) << "\n";
      return 0;
    }
  } catch (const steersim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
