#pragma once

#include <utility>
#include <vector>

#include "steersim/game.hpp"

namespace steersim {

// Mediator-side design problem: pick the signaling policy, anticipating that
// after each signal the players settle on the symmetric correlated best
// response. Conditional on signal j the followers' joint problem is linear,
//   maximize a_j * alpha_j + b_j * gamma_j
// over the polygon with vertices (1, 1), (1/2, 0), (0, 0), so only those
// vertices matter and the whole bilevel program has a closed form.

struct FollowerCoefficients {
  double a_g = 0.0;
  double b_g = 0.0;
  double a_b = 0.0;
  double b_b = 0.0;
};

FollowerCoefficients follower_coefficients(const SignalingPolicy& policy,
                                           const GameParams& params);

struct VertexChoice {
  double alpha_j = 1.0;
  double gamma_j = 1.0;
  friend bool operator==(const VertexChoice&, const VertexChoice&) = default;
};

// Closed form: (1, 1) when b_j >= -a_j / 2, otherwise (1/2, 0); exact ties go
// to (1, 1). Requires a_j >= 0.
VertexChoice solve_follower_subproblem(double a_j, double b_j);

// Independent route: score all three vertices and keep the best, breaking
// near-ties (relative width tie_tol) toward larger alpha_j.
VertexChoice best_vertex_by_enumeration(double a_j, double b_j,
                                        double tie_tol = 1e-12);

// Probability that a player invests: alpha_g weighted by the chance of the
// good signal plus alpha_b weighted by the rest.
double mediator_utility(const SignalingPolicy& policy,
                        const FollowerStrategy& follower,
                        const GameParams& params);

// Critical value of y_bad; at or above it full obedience is achievable.
double stackelberg_threshold(const GameParams& params);

enum class StackelbergCase { Case1, Case2, Case3, Case4 };

const char* to_string(StackelbergCase c);

struct StackelbergSolution {
  SignalingPolicy policy;
  FollowerStrategy follower;
  StackelbergCase case_label = StackelbergCase::Case4;
  double mediator_utility = 0.0;
  bool beta_clamped = false;  // true when the beta formula left [0, 1]
  std::vector<StackelbergSolution> alternates;
};

struct StackelbergOptions {
  // At or above threshold any alpha = beta = eta_free is optimal; this picks
  // the reported one.
  double eta_free = 0.5;
  // Below threshold two policies tie; Case2 is the alpha = 0 variant.
  enum class Selection { Case2, Case3 };
  Selection selection = Selection::Case2;
};

// Both tied sub-threshold optima, clamped into [0, 1] and flagged when the
// raw beta formula fell outside. First element is the Case2 policy.
std::pair<StackelbergSolution, StackelbergSolution> sub_threshold_solutions(
    const GameParams& params);

// Full solve. The returned solution carries the non-selected sub-threshold
// optimum in alternates; at or above threshold there is no alternate.
StackelbergSolution solve_stackelberg(const GameParams& params,
                                      const StackelbergOptions& options = {});

// Exhaustive check used by tests: scan an equispaced (alpha, beta) grid,
// resolve each follower subproblem by vertex enumeration, return the best
// mediator outcome found. resolution >= 11 grid points per axis.
StackelbergSolution grid_oracle(const GameParams& params, int resolution);

}  // namespace steersim
