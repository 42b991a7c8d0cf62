#include "steersim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace steersim {

namespace {

constexpr std::array<State, 2> kStates{State::Good, State::Bad};
constexpr std::array<Signal, 2> kSignals{Signal::Good, Signal::Bad};
constexpr std::array<Action, 2> kActions{Action::Invest, Action::NotInvest};

Action other_action(Action a) {
  return a == Action::Invest ? Action::NotInvest : Action::Invest;
}

// Deviation margins of one player against the mass restricted by an optional
// signal filter.
std::vector<DeviationMargin> deviation_margins(
    const EmpiricalDistribution& dist, const GameParams& params,
    std::optional<Signal> only_signal) {
  std::vector<DeviationMargin> out;
  for (int player = 0; player < 2; ++player) {
    for (Action from : kActions) {
      Action to = other_action(from);
      double margin = 0.0;
      for (State theta : kStates) {
        for (Signal s : kSignals) {
          if (only_signal && s != *only_signal) continue;
          for (Action a1 : kActions) {
            for (Action a2 : kActions) {
              Action own = player == 0 ? a1 : a2;
              if (own != from) continue;
              Action opp = player == 0 ? a2 : a1;
              double m = dist.at(theta, s, a1, a2);
              margin += m * (payoff(from, opp, theta, params) -
                             payoff(to, opp, theta, params));
            }
          }
        }
      }
      out.push_back({player, from, to, only_signal, margin});
    }
  }
  return out;
}

EquilibriumReport report_from_margins(std::vector<DeviationMargin> margins,
                                      double epsilon) {
  EquilibriumReport r;
  r.epsilon = epsilon;
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (const DeviationMargin& m : margins)
    r.worst_margin = std::min(r.worst_margin, m.margin);
  r.pass = r.worst_margin >= -epsilon;
  r.margins = std::move(margins);
  return r;
}

}  // namespace

std::vector<double> directness_gap(const RunTrace& trace,
                                   const ActionProfile& target) {
  if (trace.rounds.empty())
    throw std::invalid_argument("directness_gap needs a non-empty trace");
  std::vector<double> gap;
  gap.reserve(trace.rounds.size());
  long misses = 0;
  long t = 0;
  for (const RoundRecord& r : trace.rounds) {
    ++t;
    if (!(r.a1 == target.a1 && r.a2 == target.a2)) ++misses;
    gap.push_back(static_cast<double>(misses) / static_cast<double>(t));
  }
  return gap;
}

EmpiricalDistribution empirical_distribution(const RunTrace& trace) {
  if (trace.rounds.empty())
    throw std::invalid_argument("empty trace has no empirical distribution");
  EmpiricalDistribution d;
  for (const RoundRecord& r : trace.rounds)
    d.at(r.state, r.signal, r.a1, r.a2) += 1.0;
  for (double& m : d.mass) m /= static_cast<double>(trace.rounds.size());
  return d;
}

EquilibriumReport bcce_check(const EmpiricalDistribution& dist,
                             const GameParams& params, double epsilon) {
  params.validate();
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  return report_from_margins(deviation_margins(dist, params, std::nullopt),
                             epsilon);
}

EquilibriumReport bce_check_empirical(const EmpiricalDistribution& dist,
                                      const GameParams& params,
                                      double epsilon) {
  params.validate();
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  std::vector<DeviationMargin> all;
  for (Signal s : kSignals) {
    auto per_signal = deviation_margins(dist, params, s);
    all.insert(all.end(), per_signal.begin(), per_signal.end());
  }
  return report_from_margins(std::move(all), epsilon);
}

EquilibriumReport bce_check(const FollowerStrategy& strategy,
                            const SignalingPolicy& policy,
                            const GameParams& params, double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  if (!strategy.feasible())
    throw std::invalid_argument(
        "infeasible strategy: need 0 <= gamma_j <= alpha_j <= 1 and "
        "1 - 2 alpha_j + gamma_j >= 0 per signal");
  policy.validate();
  params.validate();
  double psi = params.psi;
  double a_g = psi * policy.alpha * params.z +
               (1.0 - psi) * policy.beta * params.z;
  double b_g = psi * policy.alpha * params.y_good +
               (1.0 - psi) * policy.beta * params.y_bad;
  double a_b = psi * (1.0 - policy.alpha) * params.z +
               (1.0 - psi) * (1.0 - policy.beta) * params.z;
  double b_b = psi * (1.0 - policy.alpha) * params.y_good +
               (1.0 - psi) * (1.0 - policy.beta) * params.y_bad;
  std::vector<DeviationMargin> margins;
  // Symmetric per-signal obedience value; player -1 marks "either player".
  margins.push_back({-1, Action::Invest, Action::NotInvest, Signal::Good,
                     a_g * strategy.alpha_g + b_g * strategy.gamma_g});
  margins.push_back({-1, Action::Invest, Action::NotInvest, Signal::Bad,
                     a_b * strategy.alpha_b + b_b * strategy.gamma_b});
  return report_from_margins(std::move(margins), epsilon);
}

Regime dominance_classify(const GameParams& params) {
  params.validate();
  return params.z + params.y_bad > 0.0 ? Regime::StrictlyDominant
                                       : Regime::NeedsDesign;
}

const char* to_string(Regime r) {
  return r == Regime::StrictlyDominant ? "StrictlyDominant" : "NeedsDesign";
}

const char* to_string(Mechanism m) {
  switch (m) {
    case Mechanism::InfoOnly: return "InfoOnly";
    case Mechanism::InfoPlusSublinear: return "InfoPlusSublinear";
    case Mechanism::LinearPayments: return "LinearPayments";
  }
  return "?";
}

SteerabilityVerdict steerability_classify(const GameParams& params,
                                          Mechanism mechanism) {
  params.validate();
  SteerabilityVerdict v;
  v.mechanism = mechanism;
  bool dominant = dominance_classify(params) == Regime::StrictlyDominant;
  switch (mechanism) {
    case Mechanism::InfoOnly: {
      // Obedient joint investment is an equilibrium of the base game iff the
      // prior-weighted joint return is nonnegative.
      v.condition_value = params.psi * (params.z + params.y_good) +
                          (1.0 - params.psi) * (params.z + params.y_bad);
      v.steerable = dominant || v.condition_value >= 0.0;
      v.note = v.steerable
                   ? "signals alone support the target profile"
                   : "prior-weighted joint return is negative";
      break;
    }
    case Mechanism::InfoPlusSublinear: {
      v.condition_value = params.z + params.y_bad;
      v.steerable = dominant;
      v.note = dominant
                   ? "investing is strictly dominant; no payments needed"
                   : "sublinear budgets cannot fix a negative obedience margin";
      break;
    }
    case Mechanism::LinearPayments: {
      // Any per-round payment above -(z + y_bad) makes kappa positive.
      v.condition_value = -(params.z + params.y_bad);
      v.steerable = true;
      v.note = dominant ? "already dominant; any budget works"
                        : "steerable with per-round payment above the margin";
      break;
    }
  }
  return v;
}

namespace {

double counterfactual_value(Action fixed, Action opp, State theta,
                            const GameParams& params,
                            const IncentiveScheme& scheme, int player,
                            bool use_modified) {
  double v = payoff(fixed, opp, theta, params);
  if (use_modified) v += payment(fixed, opp, scheme, player);
  return v;
}

}  // namespace

double external_regret(const RunTrace& trace, int player, Signal signal,
                       bool use_modified) {
  if (player != 0 && player != 1)
    throw std::invalid_argument("player must be 0 or 1");
  const GameParams& params = trace.config.params;
  const IncentiveScheme& scheme = trace.config.scheme;
  double actual = 0.0;
  double fixed_invest = 0.0;
  double fixed_pass = 0.0;
  for (const RoundRecord& r : trace.rounds) {
    if (r.signal != signal) continue;
    Action own = player == 0 ? r.a1 : r.a2;
    Action opp = player == 0 ? r.a2 : r.a1;
    actual += counterfactual_value(own, opp, r.state, params, scheme, player,
                                   use_modified);
    fixed_invest += counterfactual_value(Action::Invest, opp, r.state, params,
                                         scheme, player, use_modified);
    fixed_pass += counterfactual_value(Action::NotInvest, opp, r.state, params,
                                       scheme, player, use_modified);
  }
  return std::max(fixed_invest, fixed_pass) - actual;
}

double overall_regret(const RunTrace& trace, int player, bool use_modified) {
  return external_regret(trace, player, Signal::Good, use_modified) +
         external_regret(trace, player, Signal::Bad, use_modified);
}

double kappa(const GameParams& params, const IncentiveScheme& scheme) {
  params.validate();
  scheme.validate();
  double m = scheme.payment_m;
  return std::min(m + params.z + params.y_good, m + params.z + params.y_bad);
}

std::vector<double> gap_bound_curve(long horizon, int num_arms, double delta,
                                    const GameParams& params,
                                    const IncentiveScheme& scheme,
                                    BoundMode mode, double gamma_frac) {
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (num_arms < 2) throw std::invalid_argument("num_arms must be at least 2");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(gamma_frac >= 0.0))
    throw std::invalid_argument("gamma_frac must be >= 0");
  double k = kappa(params, scheme);
  if (!(k > 0.0))
    throw std::domain_error(
        "kappa <= 0: the gap bound needs a positive obedience margin");
  double kd = static_cast<double>(num_arms);
  double second = mode == BoundMode::Regular ? 2.0 * kd * std::log(kd)
                                             : gamma_frac * kd;
  double c = 2.0 * std::sqrt(2.0 * kd * std::log(2.0 * kd / delta)) +
             4.0 * std::sqrt(second);
  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(horizon));
  for (long t = 1; t <= horizon; ++t)
    curve.push_back(c / (k * std::sqrt(static_cast<double>(t))));
  return curve;
}

PaymentAccounting payment_accounting(const RunTrace& trace) {
  PaymentAccounting acc;
  acc.joint_average.reserve(trace.rounds.size());
  double joint = 0.0;
  long t = 0;
  for (const RoundRecord& r : trace.rounds) {
    ++t;
    acc.total_player1 += r.pay1;
    acc.total_player2 += r.pay2;
    joint += r.pay1 + r.pay2;
    acc.joint_average.push_back(joint / static_cast<double>(t));
  }
  return acc;
}

MetricSeries compute_metric_series(const RunTrace& trace, int player,
                                   bool use_modified) {
  if (player != 0 && player != 1)
    throw std::invalid_argument("player must be 0 or 1");
  const GameParams& params = trace.config.params;
  const IncentiveScheme& scheme = trace.config.scheme;
  const ActionProfile& target = scheme.target;

  MetricSeries series;
  std::size_t n = trace.rounds.size();
  series.directness_gap.reserve(n);
  series.regret_signal_g.reserve(n);
  series.regret_signal_b.reserve(n);
  series.overall_regret.reserve(n);
  series.avg_payment.reserve(n);

  long misses = 0;
  double joint_pay = 0.0;
  // Per signal: running actual value and both fixed-action counterfactuals.
  std::array<double, 2> actual{}, fixed_invest{}, fixed_pass{};
  long t = 0;
  for (const RoundRecord& r : trace.rounds) {
    ++t;
    if (!(r.a1 == target.a1 && r.a2 == target.a2)) ++misses;
    joint_pay += r.pay1 + r.pay2;

    int s = r.signal == Signal::Good ? 0 : 1;
    Action own = player == 0 ? r.a1 : r.a2;
    Action opp = player == 0 ? r.a2 : r.a1;
    actual[s] += counterfactual_value(own, opp, r.state, params, scheme,
                                      player, use_modified);
    fixed_invest[s] += counterfactual_value(Action::Invest, opp, r.state,
                                            params, scheme, player,
                                            use_modified);
    fixed_pass[s] += counterfactual_value(Action::NotInvest, opp, r.state,
                                          params, scheme, player,
                                          use_modified);

    double rg = std::max(fixed_invest[0], fixed_pass[0]) - actual[0];
    double rb = std::max(fixed_invest[1], fixed_pass[1]) - actual[1];
    series.directness_gap.push_back(static_cast<double>(misses) /
                                    static_cast<double>(t));
    series.regret_signal_g.push_back(rg);
    series.regret_signal_b.push_back(rb);
    series.overall_regret.push_back(rg + rb);
    series.avg_payment.push_back(joint_pay / static_cast<double>(t));
  }
  return series;
}

}  // namespace steersim
