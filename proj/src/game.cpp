#include "steersim/game.hpp"

#include <cmath>
#include <stdexcept>

namespace steersim {

State state_from_char(char c) {
  if (c == 'G') return State::Good;
  if (c == 'B') return State::Bad;
  throw std::invalid_argument(std::string("unknown state literal: ") + c);
}

Signal signal_from_char(char c) {
  if (c == 'g') return Signal::Good;
  if (c == 'b') return Signal::Bad;
  throw std::invalid_argument(std::string("unknown signal literal: ") + c);
}

Action action_from_char(char c) {
  if (c == 'I') return Action::Invest;
  if (c == 'N') return Action::NotInvest;
  throw std::invalid_argument(std::string("unknown action literal: ") + c);
}

PhiMap phi_from_name(const std::string& name) {
  if (name == "identity") return PhiMap::Identity;
  if (name == "affine") return PhiMap::Affine;
  if (name == "logistic") return PhiMap::Logistic;
  throw std::invalid_argument("unknown externality map: " + name);
}

const char* to_string(PhiMap phi) {
  switch (phi) {
    case PhiMap::Identity: return "identity";
    case PhiMap::Affine: return "affine";
    case PhiMap::Logistic: return "logistic";
  }
  return "?";
}

GameParams GameParams::direct(double psi, double z, double y_good,
                              double y_bad) {
  GameParams p;
  p.psi = psi;
  p.z = z;
  p.y_good = y_good;
  p.y_bad = y_bad;
  p.validate();
  return p;
}

GameParams GameParams::from_features(double psi, FeatureExternality f,
                                     double y_good, double y_bad) {
  GameParams p;
  p.psi = psi;
  p.y_good = y_good;
  p.y_bad = y_bad;
  p.features = std::move(f);
  p.z = resolve_externality(p);
  p.validate();
  return p;
}

void GameParams::validate() const {
  if (!(psi > 0.0 && psi < 1.0))
    throw std::invalid_argument("psi must lie strictly inside (0, 1)");
  if (!(y_good > 0.0))
    throw std::invalid_argument("y_good must be positive");
  if (!(y_bad < 0.0))
    throw std::invalid_argument("y_bad must be negative");
  if (!(z >= 0.0) || !std::isfinite(z))
    throw std::invalid_argument("externality z must be finite and >= 0");
  if (features) {
    if (features->f1.size() != features->f2.size())
      throw std::invalid_argument("feature vectors differ in dimension");
    if (!(features->phi_scale > 0.0))
      throw std::invalid_argument("phi_scale must be positive");
  }
}

double resolve_externality(const GameParams& params) {
  if (!params.features) return params.z;
  const FeatureExternality& f = *params.features;
  if (f.f1.size() != f.f2.size())
    throw std::invalid_argument("feature vectors differ in dimension");
  if (!(f.phi_scale > 0.0))
    throw std::invalid_argument("phi_scale must be positive");
  double dot = 0.0;
  for (std::size_t i = 0; i < f.f1.size(); ++i) dot += f.f1[i] * f.f2[i];
  switch (f.phi) {
    case PhiMap::Identity: return dot;
    case PhiMap::Affine: return f.phi_scale * dot + f.phi_offset;
    case PhiMap::Logistic: return 1.0 / (1.0 + std::exp(-f.phi_scale * dot));
  }
  throw std::invalid_argument("unknown externality map");
}

void IncentiveScheme::validate() const {
  if (!(payment_m >= 0.0) || !std::isfinite(payment_m))
    throw std::invalid_argument("payment_m must be finite and >= 0");
}

void SignalingPolicy::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("beta must lie in [0, 1]");
}

bool FollowerStrategy::feasible(double tol) const {
  auto ok = [tol](double alpha_j, double gamma_j) {
    return gamma_j >= -tol && gamma_j <= alpha_j + tol && alpha_j <= 1.0 + tol &&
           1.0 - 2.0 * alpha_j + gamma_j >= -tol;
  };
  return ok(alpha_g, gamma_g) && ok(alpha_b, gamma_b);
}

double payoff(Action a_self, Action a_other, State theta,
              const GameParams& params) {
  if (a_self == Action::NotInvest) return 0.0;
  if (a_other == Action::NotInvest) return params.z;
  return params.z + (theta == State::Good ? params.y_good : params.y_bad);
}

double payment(Action a_self, [[maybe_unused]] Action a_other,
               const IncentiveScheme& scheme, int player) {
  if (player != 0 && player != 1)
    throw std::invalid_argument("player must be 0 or 1");
  Action own_target = player == 0 ? scheme.target.a1 : scheme.target.a2;
  return a_self == own_target ? scheme.payment_m : 0.0;
}

double modified_utility(Action a_self, Action a_other, State theta,
                        const GameParams& params, const IncentiveScheme& scheme,
                        int player) {
  return payoff(a_self, a_other, theta, params) +
         payment(a_self, a_other, scheme, player);
}

double expected_utility(const FollowerStrategy& strategy,
                        const SignalingPolicy& policy,
                        const GameParams& params) {
  policy.validate();
  params.validate();
  if (!strategy.feasible())
    throw std::invalid_argument(
        "infeasible strategy: need 0 <= gamma_j <= alpha_j <= 1 and "
        "1 - 2 alpha_j + gamma_j >= 0 per signal");
  // Conditional on signal j, a player's expected payoff is
  // gamma_j * y_theta + alpha_j * z once the opponent's marginal is folded in.
  double good_g = strategy.gamma_g * params.y_good + strategy.alpha_g * params.z;
  double good_b = strategy.gamma_b * params.y_good + strategy.alpha_b * params.z;
  double bad_g = strategy.gamma_g * params.y_bad + strategy.alpha_g * params.z;
  double bad_b = strategy.gamma_b * params.y_bad + strategy.alpha_b * params.z;
  return params.psi * (policy.alpha * good_g + (1.0 - policy.alpha) * good_b) +
         (1.0 - params.psi) *
             (policy.beta * bad_g + (1.0 - policy.beta) * bad_b);
}

GainBounds gain_bounds(const GameParams& params, const IncentiveScheme& scheme) {
  params.validate();
  scheme.validate();
  double lo = std::min(0.0, params.z + params.y_bad);
  double hi = params.z + params.y_good + scheme.payment_m;
  return {lo, hi};
}

}  // namespace steersim
