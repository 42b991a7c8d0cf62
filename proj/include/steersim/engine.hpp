#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "steersim/exp3p.hpp"
#include "steersim/game.hpp"
#include "steersim/rng.hpp"

namespace steersim {

// Repeated-game simulator. Each player runs one learner per signal; in a
// round only the learners attached to the realized signal act and update,
// the other pair is untouched. Gains fed to the learners are modified
// utilities mapped into [0, 1] by the configuration's fixed bounds.

enum class InitMode { Uniform, Stackelberg };
enum class LearnerMode { Fixed, Theory };

struct RunConfig {
  GameParams params;
  IncentiveScheme scheme;
  SignalingPolicy policy;
  long horizon = 100000;
  InitMode init_mode = InitMode::Uniform;
  double floor = 0.01;  // keeps initial distributions off the boundary
  Exp3pConfig learner;  // template; initial_dist is filled per signal
  LearnerMode learner_mode = LearnerMode::Fixed;
  double confidence = 0.05;  // delta for horizon-tuned parameters
  // Per-signal investment marginals of the anticipated equilibrium; required
  // when init_mode is Stackelberg.
  std::optional<FollowerStrategy> se_follower;
  std::uint64_t seed = 1;
  bool allow_degenerate_init = false;  // test hook: skip the floor clamp

  void validate() const;
  std::uint64_t semantic_hash() const;
};

struct RoundRecord {
  State state;
  Signal signal;
  Action a1;
  Action a2;
  double r1;    // modified utility, player 1
  double r2;    // modified utility, player 2
  double pay1;  // payment component of r1
  double pay2;  // payment component of r2
};

struct RunTrace {
  RunConfig config;  // copy, so analyses need nothing else
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<RoundRecord> rounds;
  std::array<std::array<LearnerState, 2>, 2> final_learners;  // [player][signal]
};

State sample_state(const GameParams& params, SplitMix64& rng);
Signal sample_signal(State state, const SignalingPolicy& policy,
                     SplitMix64& rng);

// P(Invest) per signal {g, b}. Uniform mode returns 1/2 for both; Stackelberg
// mode returns the equilibrium marginals clamped into [floor, 1 - floor].
std::array<double, 2> build_initial_distributions(
    InitMode mode, const FollowerStrategy* se_follower, double floor,
    bool allow_degenerate = false);

RunTrace run_episode(const RunConfig& config);

// runs episodes with per-run seeds derived from config.seed; results are
// identical for any thread count. num_threads <= 0 picks a default.
std::vector<RunTrace> run_batch(const RunConfig& config, int runs,
                                int num_threads = 0);

// Columns t,state,signal,a1,a2,r1,r2,pay1,pay2 with literals G/B, g/b, I/N.
void write_trace_csv(std::ostream& out, const RunTrace& trace);
// Same with a leading run column, all runs concatenated.
void write_batch_csv(std::ostream& out, const std::vector<RunTrace>& traces);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// FNV-1a over a canonical text rendering; backs the config hashes.
std::uint64_t fnv1a64(const std::string& text);

}  // namespace steersim
