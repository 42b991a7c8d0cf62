#include "steersim/exp3p.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace steersim {

void Exp3pConfig::validate() const {
  if (num_arms < 2) throw std::invalid_argument("num_arms must be at least 2");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning_rate must be finite and positive");
  if (!(exploration >= 0.0 && exploration <= 1.0))
    throw std::invalid_argument("exploration must lie in [0, 1]");
  if (!(bias >= 0.0 && bias <= 1.0))
    throw std::invalid_argument("bias must lie in [0, 1]");
  if (!initial_dist.empty()) {
    if (initial_dist.size() != static_cast<std::size_t>(num_arms))
      throw std::invalid_argument("initial_dist size differs from num_arms");
    double sum = 0.0;
    for (double p : initial_dist) {
      if (!(p > 0.0) && !(allow_degenerate && p == 0.0))
        throw std::invalid_argument("initial_dist entries must be positive");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("initial_dist must sum to 1");
  }
}

bool Exp3pConfig::theory_preconditions_ok() const {
  return exploration <= 0.5 &&
         (1.0 + bias) * num_arms * learning_rate <= exploration;
}

Exp3pLearner::Exp3pLearner(Exp3pConfig config) : config_(std::move(config)) {
  config_.validate();
  int k = config_.num_arms;
  std::vector<double> prior = config_.initial_dist;
  if (prior.empty()) prior.assign(k, 1.0 / k);
  log_prior_.resize(k);
  for (int i = 0; i < k; ++i)
    log_prior_[i] = prior[i] > 0.0
                        ? std::log(prior[i])
                        : -std::numeric_limits<double>::infinity();
  state_.cum_gains.assign(k, 0.0);
  state_.weights.resize(k);
  state_.probabilities.resize(k);
  state_.round = 0;
  refresh_distribution();
}

void Exp3pLearner::refresh_distribution() {
  int k = config_.num_arms;
  double eta = config_.learning_rate;
  double shift = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i)
    shift = std::max(shift, log_prior_[i] + eta * state_.cum_gains[i]);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    double w = std::exp(log_prior_[i] + eta * state_.cum_gains[i] - shift);
    state_.weights[i] = w;
    sum += w;
  }
  double gamma = config_.exploration;
  double floor = gamma / k;
  for (int i = 0; i < k; ++i) {
    state_.weights[i] /= sum;
    state_.probabilities[i] = (1.0 - gamma) * state_.weights[i] + floor;
  }
}

int Exp3pLearner::sample_action(double u01) const {
  const std::vector<double>& p = state_.probabilities;
  double acc = 0.0;
  int last_positive = 0;
  for (int i = 0; i < config_.num_arms; ++i) {
    if (p[i] > 0.0) last_positive = i;
    acc += p[i];
    if (u01 < acc) return i;
  }
  return last_positive;  // u01 landed in rounding slack past the last arm
}

void Exp3pLearner::update(int chosen, double gain) {
  if (chosen < 0 || chosen >= config_.num_arms)
    throw std::invalid_argument("chosen arm out of range");
  if (!(gain >= 0.0 && gain <= 1.0))
    throw std::domain_error("gain must lie in [0, 1]; normalize it first");
  for (int i = 0; i < config_.num_arms; ++i) {
    double numer = (i == chosen ? gain : 0.0) + config_.bias;
    double p = state_.probabilities[i];
    // Arms with zero prior keep probability zero and are never estimated.
    if (numer != 0.0 && p > 0.0) state_.cum_gains[i] += numer / p;
  }
  ++state_.round;
  refresh_distribution();
}

double normalize_gain(double v, double v_min, double v_max) {
  if (!(v_max > v_min))
    throw std::invalid_argument("gain bounds must satisfy v_max > v_min");
  if (!(v >= v_min && v <= v_max))
    throw std::domain_error("value outside declared gain bounds");
  return (v - v_min) / (v_max - v_min);
}

TheoryParams theory_params(long horizon, int num_arms, double delta,
                           double pi_star) {
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (num_arms < 2) throw std::invalid_argument("num_arms must be at least 2");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(pi_star > 0.0 && pi_star <= 1.0))
    throw std::invalid_argument("pi_star must lie in (0, 1]");
  double kt = static_cast<double>(num_arms) * static_cast<double>(horizon);
  TheoryParams t;
  t.bias = std::sqrt(std::log(num_arms / delta) / kt);
  t.learning_rate = std::sqrt(std::log(1.0 / pi_star) / kt);
  t.exploration = (1.0 + t.bias) * num_arms * t.learning_rate;
  t.no_learning = t.learning_rate == 0.0;
  t.preconditions_ok = t.exploration <= 0.5 && t.bias <= 1.0;
  return t;
}

double regret_bound(long horizon, int num_arms, double delta, double pi_star) {
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (num_arms < 2) throw std::invalid_argument("num_arms must be at least 2");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(pi_star > 0.0 && pi_star <= 1.0))
    throw std::invalid_argument("pi_star must lie in (0, 1]");
  double tk = static_cast<double>(horizon) * static_cast<double>(num_arms);
  return std::sqrt(tk) * (4.0 * std::sqrt(std::log(1.0 / pi_star)) +
                          2.0 * std::sqrt(std::log(num_arms / delta)));
}

}  // namespace steersim
