#pragma once

#include <vector>

#include "steersim/rng.hpp"

namespace steersim {

// EXP3.P with a non-uniform starting distribution. Exponential weights over
// optimistically biased importance-weighted gain estimates,
//   ghat_i = (gain * [i == chosen] + bias) / p_t(i),
// with the prior folded in as the initial weight:
//   p_{t+1}(i) = (1 - gamma) * pi_i exp(eta Ghat_i) / sum_k pi_k exp(eta Ghat_k)
//              + gamma / K.
// Weights are kept in log space and renormalized with a max shift on every
// update, so long horizons cannot overflow.

struct Exp3pConfig {
  int num_arms = 2;
  double learning_rate = 0.05;         // eta > 0
  double exploration = 0.0;            // gamma in [0, 1]
  double bias = 0.0;                   // beta in [0, 1]
  std::vector<double> initial_dist;    // empty means uniform
  bool allow_degenerate = false;       // test hook: permit zero prior entries

  void validate() const;  // throws std::invalid_argument
  // Requirements of the high-probability analysis: gamma <= 1/2 and
  // (1 + bias) * K * eta <= gamma.
  bool theory_preconditions_ok() const;
};

struct LearnerState {
  std::vector<double> weights;        // normalized exponential weights
  std::vector<double> probabilities;  // (1 - gamma) * weights + gamma / K
  std::vector<double> cum_gains;      // cumulative gain estimates Ghat
  long round = 0;
};

class Exp3pLearner {
 public:
  explicit Exp3pLearner(Exp3pConfig config);

  int sample_action(double u01) const;
  int sample_action(SplitMix64& rng) const { return sample_action(rng.next_double()); }

  // gain must lie in [0, 1]; normalize first if it does not.
  void update(int chosen, double gain);

  const LearnerState& state() const { return state_; }
  const Exp3pConfig& config() const { return config_; }

 private:
  void refresh_distribution();

  Exp3pConfig config_;
  std::vector<double> log_prior_;
  LearnerState state_;
};

// (v - v_min) / (v_max - v_min); v must lie inside the declared bounds.
double normalize_gain(double v, double v_min, double v_max);

// Horizon-tuned parameters: bias = sqrt(ln(K/delta) / (K T)), learning rate
// sqrt(ln(1/pi_star) / (K T)), exploration (1 + bias) * K * learning rate.
struct TheoryParams {
  double bias = 0.0;
  double learning_rate = 0.0;
  double exploration = 0.0;
  bool preconditions_ok = true;  // false when the horizon is too small
  bool no_learning = false;      // pi_star = 1 collapses the learning rate
};

TheoryParams theory_params(long horizon, int num_arms, double delta,
                           double pi_star);

// High-probability external-regret bound at the tuned parameters:
// sqrt(T K) * (4 sqrt(ln(1/pi_star)) + 2 sqrt(ln(K/delta))).
double regret_bound(long horizon, int num_arms, double delta, double pi_star);

}  // namespace steersim
