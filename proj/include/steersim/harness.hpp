#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "steersim/analysis.hpp"
#include "steersim/engine.hpp"
#include "steersim/stackelberg.hpp"

namespace steersim {

// Experiment orchestration: parse a strict JSON description, run seeded
// batches for the requested arms, aggregate per-round statistics across
// runs, and emit plot-ready CSV files plus a JSON sidecar.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PinnedSe {
  SignalingPolicy policy;
  FollowerStrategy follower;
};

struct ExperimentConfig {
  std::string name = "experiment";
  GameParams params;
  double payment_m = 0.0;
  ActionProfile target{Action::Invest, Action::Invest};
  std::optional<SignalingPolicy> policy;  // absent: use the solved policy
  double eta = 0.05;
  double gamma = 0.0;
  double beta_bias = 0.0;
  LearnerMode learner_mode = LearnerMode::Fixed;
  double confidence = 0.05;
  long horizon = 100000;
  int runs = 50;
  double floor = 0.01;
  std::uint64_t seed = 1;
  std::vector<std::string> arms{"regular", "se"};
  long stride = 1;
  double se_eta = 0.5;
  StackelbergOptions::Selection se_selection =
      StackelbergOptions::Selection::Case2;
  std::optional<PinnedSe> se_pinned;  // bypasses the solver entirely
  std::optional<double> gamma_frac;   // override for the se-mode bound
  bool raw_regret = false;            // diagnostic: regret on base payoffs

  IncentiveScheme scheme() const { return {payment_m, target}; }
  std::uint64_t semantic_hash() const;
  nlohmann::ordered_json echo() const;
};

// Strict parse: unknown keys are rejected by name, every violation names its
// field. Defaults match the struct above.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

struct ArmTable {
  std::string arm;  // "regular" or "se"
  long horizon = 0;
  int runs = 0;
  std::vector<double> delta_mean, delta_std;
  std::vector<double> regret_mean, regret_std;
  std::vector<double> payment_avg;
  std::vector<double> bound;
  std::vector<double> final_delta_per_run;
  std::vector<double> final_regret_per_run;
  double frac_not_led = 0.0;  // share of rounds whose signal is not fully led
  double gamma_frac_used = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::optional<StackelbergSolution> se;
  std::vector<ArmTable> arms;
  std::vector<std::string> warnings;
};

struct RunOptions {
  int num_threads = 0;       // <= 0 picks a default
  bool dump_traces = false;  // write one trace CSV per run
  std::string trace_dir;     // required when dump_traces is set
  bool force = false;        // clobber protection for trace dumps
};

// The equilibrium an experiment uses: the pinned one when provided,
// otherwise the solver's under the config's selection options.
StackelbergSolution resolve_se(const ExperimentConfig& config);

// Refuses configurations whose obedience margin kappa is not positive.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const RunOptions& options = {});

// Writes <name>_<arm>.csv per arm, <name>_combined.csv, <name>_meta.json.
// Refuses to overwrite existing files unless force is set.
void emit_plot_data(const ExperimentResult& result, const std::string& out_dir,
                    bool force);

nlohmann::ordered_json solution_to_json(const StackelbergSolution& solution);
nlohmann::ordered_json classify_to_json(const GameParams& params);

}  // namespace steersim
