#include "steersim/stackelberg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace steersim {

namespace {

constexpr VertexChoice kFull{1.0, 1.0};
constexpr VertexChoice kHalf{0.5, 0.0};
constexpr VertexChoice kNone{0.0, 0.0};

StackelbergCase classify_case(const VertexChoice& g, const VertexChoice& b) {
  bool g_full = g == kFull;
  bool b_full = b == kFull;
  if (g_full && b_full) return StackelbergCase::Case4;
  if (g_full) return StackelbergCase::Case3;
  if (b_full) return StackelbergCase::Case2;
  return StackelbergCase::Case1;
}

FollowerStrategy to_strategy(const VertexChoice& g, const VertexChoice& b) {
  return {g.alpha_j, g.gamma_j, b.alpha_j, b.gamma_j};
}

}  // namespace

FollowerCoefficients follower_coefficients(const SignalingPolicy& policy,
                                           const GameParams& params) {
  policy.validate();
  params.validate();
  double psi = params.psi;
  double alpha = policy.alpha;
  double beta = policy.beta;
  FollowerCoefficients c;
  c.a_g = psi * alpha * params.z + (1.0 - psi) * beta * params.z;
  c.b_g = psi * alpha * params.y_good + (1.0 - psi) * beta * params.y_bad;
  c.a_b = psi * (1.0 - alpha) * params.z + (1.0 - psi) * (1.0 - beta) * params.z;
  c.b_b = psi * (1.0 - alpha) * params.y_good +
          (1.0 - psi) * (1.0 - beta) * params.y_bad;
  return c;
}

VertexChoice solve_follower_subproblem(double a_j, double b_j) {
  if (!(a_j >= 0.0))
    throw std::invalid_argument("follower coefficient a_j must be >= 0");
  return b_j >= -a_j / 2.0 ? kFull : kHalf;
}

VertexChoice best_vertex_by_enumeration(double a_j, double b_j,
                                        double tie_tol) {
  double full = a_j + b_j;
  double half = a_j / 2.0;
  double none = 0.0;
  double tol = tie_tol * std::max({1.0, std::fabs(a_j), std::fabs(b_j)});
  // Preference on ties runs toward larger alpha_j.
  VertexChoice best = kFull;
  double best_value = full;
  if (half > best_value + tol) {
    best = kHalf;
    best_value = half;
  }
  if (none > best_value + tol) best = kNone;
  return best;
}

double mediator_utility(const SignalingPolicy& policy,
                        const FollowerStrategy& follower,
                        const GameParams& params) {
  double p_good = params.psi * policy.alpha + (1.0 - params.psi) * policy.beta;
  return follower.alpha_g * p_good + follower.alpha_b * (1.0 - p_good);
}

double stackelberg_threshold(const GameParams& params) {
  params.validate();
  return -(params.psi * params.y_good + params.z / 2.0) / (1.0 - params.psi);
}

const char* to_string(StackelbergCase c) {
  switch (c) {
    case StackelbergCase::Case1: return "Case1";
    case StackelbergCase::Case2: return "Case2";
    case StackelbergCase::Case3: return "Case3";
    case StackelbergCase::Case4: return "Case4";
  }
  return "?";
}

std::pair<StackelbergSolution, StackelbergSolution> sub_threshold_solutions(
    const GameParams& params) {
  params.validate();
  double denom = -params.y_bad - params.z / 2.0;
  if (!(denom > 0.0))
    throw std::domain_error(
        "threshold-degenerate parameters: -y_bad - z/2 must be positive "
        "below threshold");
  double ratio = params.psi * (params.y_good + params.z / 2.0) /
                 ((1.0 - params.psi) * denom);

  auto make = [&](double alpha, double beta_raw, const VertexChoice& g,
                  const VertexChoice& b, StackelbergCase label) {
    StackelbergSolution s;
    s.policy.alpha = alpha;
    s.policy.beta = std::clamp(beta_raw, 0.0, 1.0);
    s.beta_clamped = s.policy.beta != beta_raw;
    s.follower = to_strategy(g, b);
    s.case_label = label;
    s.mediator_utility = mediator_utility(s.policy, s.follower, params);
    return s;
  };

  // The two optima split the burden of persuading the bad state: either the
  // good signal is reserved for the good state (alpha = 1, partial beta) or
  // inverted (alpha = 0) with the roles of the signals swapped.
  StackelbergSolution case2 =
      make(0.0, 1.0 - ratio, kHalf, kFull, StackelbergCase::Case2);
  StackelbergSolution case3 =
      make(1.0, ratio, kFull, kHalf, StackelbergCase::Case3);
  return {case2, case3};
}

StackelbergSolution solve_stackelberg(const GameParams& params,
                                      const StackelbergOptions& options) {
  params.validate();
  if (!(options.eta_free >= 0.0 && options.eta_free <= 1.0))
    throw std::invalid_argument("eta_free must lie in [0, 1]");

  if (params.y_bad >= stackelberg_threshold(params)) {
    StackelbergSolution s;
    s.policy = {options.eta_free, options.eta_free};
    s.follower = to_strategy(kFull, kFull);
    s.case_label = StackelbergCase::Case4;
    s.mediator_utility = mediator_utility(s.policy, s.follower, params);
    return s;
  }

  auto [case2, case3] = sub_threshold_solutions(params);
  StackelbergSolution selected, other;
  if (options.selection == StackelbergOptions::Selection::Case2) {
    selected = std::move(case2);
    other = std::move(case3);
  } else {
    selected = std::move(case3);
    other = std::move(case2);
  }
  selected.alternates.push_back(std::move(other));
  return selected;
}

StackelbergSolution grid_oracle(const GameParams& params, int resolution) {
  params.validate();
  if (resolution < 11)
    throw std::invalid_argument("grid resolution must be at least 11");
  StackelbergSolution best;
  best.mediator_utility = -1.0;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      SignalingPolicy policy{static_cast<double>(i) / (resolution - 1),
                             static_cast<double>(j) / (resolution - 1)};
      FollowerCoefficients c = follower_coefficients(policy, params);
      VertexChoice g = best_vertex_by_enumeration(c.a_g, c.b_g);
      VertexChoice b = best_vertex_by_enumeration(c.a_b, c.b_b);
      FollowerStrategy follower = to_strategy(g, b);
      double value = mediator_utility(policy, follower, params);
      if (value > best.mediator_utility) {
        best.policy = policy;
        best.follower = follower;
        best.case_label = classify_case(g, b);
        best.mediator_utility = value;
      }
    }
  }
  return best;
}

}  // namespace steersim
