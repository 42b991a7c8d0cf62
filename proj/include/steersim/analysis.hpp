#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "steersim/engine.hpp"
#include "steersim/game.hpp"

namespace steersim {

// Post-hoc measurements over recorded traces: obedience to the target
// profile, equilibrium quality of the empirical play distribution, learner
// regret, payment totals, and the theoretical curves they are plotted
// against.

struct EmpiricalDistribution {
  std::array<double, 16> mass{};  // (state, signal, a1, a2), row-major

  static int index(State theta, Signal s, Action a1, Action a2) {
    return (static_cast<int>(theta) << 3) | (static_cast<int>(s) << 2) |
           (static_cast<int>(a1) << 1) | static_cast<int>(a2);
  }
  double at(State theta, Signal s, Action a1, Action a2) const {
    return mass[index(theta, s, a1, a2)];
  }
  double& at(State theta, Signal s, Action a1, Action a2) {
    return mass[index(theta, s, a1, a2)];
  }
};

// delta(t) for t = 1..T: running fraction of rounds whose action profile
// missed the target.
std::vector<double> directness_gap(const RunTrace& trace,
                                   const ActionProfile& target);

EmpiricalDistribution empirical_distribution(const RunTrace& trace);

struct DeviationMargin {
  int player = 0;  // 0 or 1; -1 when the margin applies to both by symmetry
  Action from = Action::Invest;
  Action to = Action::NotInvest;
  std::optional<Signal> signal;  // set for signal-conditional checks
  double margin = 0.0;
};

struct EquilibriumReport {
  bool pass = true;
  double worst_margin = 0.0;
  double epsilon = 0.0;
  std::vector<DeviationMargin> margins;
};

// Coarse check: fixed-action deviations evaluated against the full joint
// distribution, ignoring the signal.
EquilibriumReport bcce_check(const EmpiricalDistribution& dist,
                             const GameParams& params, double epsilon);

// Signal-conditional variant of the same deviation test.
EquilibriumReport bce_check_empirical(const EmpiricalDistribution& dist,
                                      const GameParams& params,
                                      double epsilon);

// Strategy-form obedience check: a_j * alpha_j + b_j * gamma_j >= -epsilon
// per signal for a feasible symmetric strategy.
EquilibriumReport bce_check(const FollowerStrategy& strategy,
                            const SignalingPolicy& policy,
                            const GameParams& params, double epsilon);

enum class Regime { StrictlyDominant, NeedsDesign };

// StrictlyDominant iff z + y_bad > 0: investing then dominates regardless of
// the state and the opponent.
Regime dominance_classify(const GameParams& params);

enum class Mechanism { InfoOnly, InfoPlusSublinear, LinearPayments };

const char* to_string(Regime r);
const char* to_string(Mechanism m);

struct SteerabilityVerdict {
  Mechanism mechanism = Mechanism::InfoOnly;
  bool steerable = false;
  double condition_value = 0.0;
  std::string note;
};

SteerabilityVerdict steerability_classify(const GameParams& params,
                                          Mechanism mechanism);

// Hindsight regret against the best fixed action, over the rounds carrying
// the given signal. use_modified=false measures against base payoffs
// (diagnostic only).
double external_regret(const RunTrace& trace, int player, Signal signal,
                       bool use_modified = true);

// Sum of the two per-signal regrets.
double overall_regret(const RunTrace& trace, int player,
                      bool use_modified = true);

// Obedience margin of the modified game: min(M + z + y_good, M + z + y_bad).
// Steering analyses require it positive.
double kappa(const GameParams& params, const IncentiveScheme& scheme);

enum class BoundMode { Regular, SeInitiated };

// Theoretical directness-gap envelope c / (kappa sqrt(t)) for t = 1..horizon.
// Regular mode: c = 2 sqrt(2K ln(2K/delta)) + 4 sqrt(2K ln K). SeInitiated
// mode replaces the second radicand with gamma_frac * K, where gamma_frac
// aggregates the off-target signal mass and prior term of the sharper bound.
std::vector<double> gap_bound_curve(long horizon, int num_arms, double delta,
                                    const GameParams& params,
                                    const IncentiveScheme& scheme,
                                    BoundMode mode, double gamma_frac = 0.0);

struct PaymentAccounting {
  double total_player1 = 0.0;
  double total_player2 = 0.0;
  std::vector<double> joint_average;  // (1/t) * sum of both players' payments
};

PaymentAccounting payment_accounting(const RunTrace& trace);

// Everything the harness aggregates per run, as full per-round series.
struct MetricSeries {
  std::vector<double> directness_gap;
  std::vector<double> regret_signal_g;
  std::vector<double> regret_signal_b;
  std::vector<double> overall_regret;  // pointwise sum of the two above
  std::vector<double> avg_payment;
};

MetricSeries compute_metric_series(const RunTrace& trace, int player,
                                   bool use_modified = true);

}  // namespace steersim
