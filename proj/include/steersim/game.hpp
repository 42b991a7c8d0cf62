#pragma once

#include <optional>
#include <string>
#include <vector>

namespace steersim {

// Two-player simultaneous investment game with a payoff-relevant world state
// and a public recommendation signal. Action I invests, N abstains; investing
// alone earns the externality z, investing together adds the state-dependent
// return y_theta on top.

enum class State : unsigned char { Good, Bad };
enum class Signal : unsigned char { Good, Bad };
enum class Action : unsigned char { Invest, NotInvest };

inline char to_char(State s) { return s == State::Good ? 'G' : 'B'; }
inline char to_char(Signal s) { return s == Signal::Good ? 'g' : 'b'; }
inline char to_char(Action a) { return a == Action::Invest ? 'I' : 'N'; }

State state_from_char(char c);
Signal signal_from_char(char c);
Action action_from_char(char c);

struct ActionProfile {
  Action a1 = Action::Invest;
  Action a2 = Action::Invest;
  friend bool operator==(const ActionProfile&, const ActionProfile&) = default;
};

// Monotone maps for deriving the externality from feature vectors.
enum class PhiMap { Identity, Affine, Logistic };

PhiMap phi_from_name(const std::string& name);  // throws on unknown name
const char* to_string(PhiMap phi);

struct FeatureExternality {
  std::vector<double> f1;
  std::vector<double> f2;
  PhiMap phi = PhiMap::Identity;
  double phi_scale = 1.0;   // slope; must be positive to keep phi monotone
  double phi_offset = 0.0;  // Affine only
};

struct GameParams {
  double psi = 0.5;     // prior probability of the good state
  double y_good = 1.0;  // joint-investment return in the good state, > 0
  double y_bad = -0.5;  // joint-investment return in the bad state, < 0
  double z = 0.0;       // resolved externality, >= 0
  std::optional<FeatureExternality> features;  // set when z came from features

  static GameParams direct(double psi, double z, double y_good, double y_bad);
  static GameParams from_features(double psi, FeatureExternality f,
                                  double y_good, double y_bad);

  void validate() const;  // throws std::invalid_argument
};

// phi(<f1, f2>) for feature-based params, the stored z otherwise.
double resolve_externality(const GameParams& params);

// Payment rule: a flat payment M to each player whose own action matches the
// player's component of the target profile d. Payments therefore land in
// [0, M] and the per-player budget parameter coincides with M.
struct IncentiveScheme {
  double payment_m = 0.0;
  ActionProfile target{Action::Invest, Action::Invest};

  void validate() const;  // throws std::invalid_argument
};

// Signaling policy (alpha, beta): probability of recommending "good" in the
// good and bad states respectively.
struct SignalingPolicy {
  double alpha = 1.0;
  double beta = 0.0;

  void validate() const;  // throws std::invalid_argument
};

// Symmetric per-signal strategy summary: alpha_j is each player's marginal
// probability of investing after signal j, gamma_j the probability both
// invest. Feasible iff 0 <= gamma_j <= alpha_j <= 1 and 1 - 2 alpha_j +
// gamma_j >= 0 for both signals.
struct FollowerStrategy {
  double alpha_g = 1.0;
  double gamma_g = 1.0;
  double alpha_b = 1.0;
  double gamma_b = 1.0;

  bool feasible(double tol = 1e-9) const;

  bool operator==(const FollowerStrategy&) const = default;
};

double payoff(Action a_self, Action a_other, State theta,
              const GameParams& params);

// player is 0 or 1 and selects which component of the target the payment
// keys on; a_other is part of the payment rule's domain but unused by the
// flat own-action rule.
double payment(Action a_self, Action a_other, const IncentiveScheme& scheme,
               int player);

double modified_utility(Action a_self, Action a_other, State theta,
                        const GameParams& params, const IncentiveScheme& scheme,
                        int player);

// Ex-ante expected base utility of either player under a feasible symmetric
// strategy and a signaling policy. Throws on infeasible strategies.
double expected_utility(const FollowerStrategy& strategy,
                        const SignalingPolicy& policy,
                        const GameParams& params);

// Range of the modified utility over all (theta, a1, a2); fixed per
// configuration and used to map realized gains into [0, 1].
struct GainBounds {
  double lo = 0.0;
  double hi = 1.0;
};

GainBounds gain_bounds(const GameParams& params, const IncentiveScheme& scheme);

}  // namespace steersim
