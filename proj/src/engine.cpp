#include "steersim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

namespace steersim {

namespace {

// Substream indices within a run.
enum Stream : std::uint64_t { kState = 0, kSignal = 1, kAction1 = 2, kAction2 = 3 };

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  h ^= 0xFF;
  h *= kFnvPrime;
}

void fnv_mix(std::uint64_t& h, double v) { fnv_mix(h, format_double(v)); }
void fnv_mix(std::uint64_t& h, long v) { fnv_mix(h, std::to_string(v)); }
void fnv_mix(std::uint64_t& h, std::uint64_t v) { fnv_mix(h, std::to_string(v)); }

int arm_of(Action a) { return a == Action::Invest ? 0 : 1; }
Action action_of(int arm) { return arm == 0 ? Action::Invest : Action::NotInvest; }

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : text) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void RunConfig::validate() const {
  params.validate();
  scheme.validate();
  policy.validate();
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (!allow_degenerate_init && !(floor > 0.0 && floor < 0.5))
    throw std::invalid_argument("floor must lie in (0, 0.5)");
  if (learner.num_arms != 2)
    throw std::invalid_argument("the stage game has exactly two actions");
  if (!(learner.learning_rate > 0.0))
    throw std::invalid_argument("learning_rate must be positive");
  if (!(learner.exploration >= 0.0 && learner.exploration <= 1.0))
    throw std::invalid_argument("exploration must lie in [0, 1]");
  if (!(learner.bias >= 0.0 && learner.bias <= 1.0))
    throw std::invalid_argument("bias must lie in [0, 1]");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("confidence must lie in (0, 1)");
  if (init_mode == InitMode::Stackelberg && !se_follower)
    throw std::invalid_argument(
        "Stackelberg initialization needs the equilibrium follower strategy");
}

std::uint64_t RunConfig::semantic_hash() const {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, params.psi);
  fnv_mix(h, params.y_good);
  fnv_mix(h, params.y_bad);
  fnv_mix(h, params.z);
  if (params.features) {
    fnv_mix(h, std::string(to_string(params.features->phi)));
    fnv_mix(h, params.features->phi_scale);
    fnv_mix(h, params.features->phi_offset);
    for (double v : params.features->f1) fnv_mix(h, v);
    for (double v : params.features->f2) fnv_mix(h, v);
  }
  fnv_mix(h, scheme.payment_m);
  fnv_mix(h, std::string{to_char(scheme.target.a1), to_char(scheme.target.a2)});
  fnv_mix(h, policy.alpha);
  fnv_mix(h, policy.beta);
  fnv_mix(h, horizon);
  fnv_mix(h, init_mode == InitMode::Uniform ? std::string("uniform")
                                            : std::string("stackelberg"));
  fnv_mix(h, floor);
  fnv_mix(h, learner.learning_rate);
  fnv_mix(h, learner.exploration);
  fnv_mix(h, learner.bias);
  fnv_mix(h, learner_mode == LearnerMode::Fixed ? std::string("fixed")
                                                : std::string("theory"));
  fnv_mix(h, confidence);
  if (se_follower) {
    fnv_mix(h, se_follower->alpha_g);
    fnv_mix(h, se_follower->gamma_g);
    fnv_mix(h, se_follower->alpha_b);
    fnv_mix(h, se_follower->gamma_b);
  }
  fnv_mix(h, seed);
  return h;
}

State sample_state(const GameParams& params, SplitMix64& rng) {
  return rng.next_double() < params.psi ? State::Good : State::Bad;
}

Signal sample_signal(State state, const SignalingPolicy& policy,
                     SplitMix64& rng) {
  double p_good = state == State::Good ? policy.alpha : policy.beta;
  return rng.next_double() < p_good ? Signal::Good : Signal::Bad;
}

std::array<double, 2> build_initial_distributions(
    InitMode mode, const FollowerStrategy* se_follower, double floor,
    bool allow_degenerate) {
  if (mode == InitMode::Uniform) return {0.5, 0.5};
  if (se_follower == nullptr)
    throw std::invalid_argument(
        "Stackelberg initialization needs the equilibrium follower strategy");
  if (allow_degenerate)
    return {se_follower->alpha_g, se_follower->alpha_b};
  if (!(floor > 0.0 && floor < 0.5))
    throw std::invalid_argument("floor must lie in (0, 0.5)");
  return {std::clamp(se_follower->alpha_g, floor, 1.0 - floor),
          std::clamp(se_follower->alpha_b, floor, 1.0 - floor)};
}

RunTrace run_episode(const RunConfig& config) {
  config.validate();

  std::array<double, 2> invest_prob = build_initial_distributions(
      config.init_mode, config.se_follower ? &*config.se_follower : nullptr,
      config.floor, config.allow_degenerate_init);

  GainBounds bounds = gain_bounds(config.params, config.scheme);

  // Learner grid [player][signal].
  std::array<std::array<std::optional<Exp3pLearner>, 2>, 2> learners;
  for (int player = 0; player < 2; ++player) {
    for (int sig = 0; sig < 2; ++sig) {
      Exp3pConfig cfg = config.learner;
      cfg.num_arms = 2;
      cfg.initial_dist = {invest_prob[sig], 1.0 - invest_prob[sig]};
      cfg.allow_degenerate = config.allow_degenerate_init;
      if (config.learner_mode == LearnerMode::Theory) {
        Action own_target =
            player == 0 ? config.scheme.target.a1 : config.scheme.target.a2;
        double pi_star = cfg.initial_dist[arm_of(own_target)];
        TheoryParams t =
            theory_params(config.horizon, 2, config.confidence, pi_star);
        if (!t.preconditions_ok || t.no_learning)
          throw std::invalid_argument(
              "horizon too small for horizon-tuned learner parameters");
        cfg.bias = t.bias;
        cfg.learning_rate = t.learning_rate;
        cfg.exploration = t.exploration;
      }
      learners[player][sig].emplace(std::move(cfg));
    }
  }

  SplitMix64 state_rng(stream_seed(config.seed, kState));
  SplitMix64 signal_rng(stream_seed(config.seed, kSignal));
  std::array<SplitMix64, 2> action_rng{
      SplitMix64(stream_seed(config.seed, kAction1)),
      SplitMix64(stream_seed(config.seed, kAction2))};

  RunTrace trace;
  trace.config = config;
  trace.seed = config.seed;
  trace.config_hash = config.semantic_hash();
  trace.rounds.reserve(static_cast<std::size_t>(config.horizon));

  for (long t = 0; t < config.horizon; ++t) {
    State theta = sample_state(config.params, state_rng);
    Signal sig = sample_signal(theta, config.policy, signal_rng);
    int s = sig == Signal::Good ? 0 : 1;

    int arm1 = learners[0][s]->sample_action(action_rng[0]);
    int arm2 = learners[1][s]->sample_action(action_rng[1]);
    Action a1 = action_of(arm1);
    Action a2 = action_of(arm2);

    double pay1 = payment(a1, a2, config.scheme, 0);
    double pay2 = payment(a2, a1, config.scheme, 1);
    double r1 = payoff(a1, a2, theta, config.params) + pay1;
    double r2 = payoff(a2, a1, theta, config.params) + pay2;

    learners[0][s]->update(arm1, normalize_gain(r1, bounds.lo, bounds.hi));
    learners[1][s]->update(arm2, normalize_gain(r2, bounds.lo, bounds.hi));

    trace.rounds.push_back({theta, sig, a1, a2, r1, r2, pay1, pay2});
  }

  for (int player = 0; player < 2; ++player)
    for (int sig = 0; sig < 2; ++sig)
      trace.final_learners[player][sig] = learners[player][sig]->state();
  return trace;
}

std::vector<RunTrace> run_batch(const RunConfig& config, int runs,
                                int num_threads) {
  if (runs < 1) throw std::invalid_argument("runs must be positive");
  config.validate();
  if (num_threads <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    num_threads = static_cast<int>(hw == 0 ? 1 : hw);
  }
  num_threads = std::min(num_threads, runs);

  std::vector<RunTrace> traces(runs);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      int r = next.fetch_add(1);
      if (r >= runs) return;
      RunConfig run_cfg = config;
      run_cfg.seed = run_seed(config.seed, static_cast<std::uint64_t>(r));
      traces[r] = run_episode(run_cfg);
    }
  };
  if (num_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(num_threads);
    for (int i = 0; i < num_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return traces;
}

namespace {

void write_round(std::ostream& out, const RoundRecord& r) {
  out << to_char(r.state) << ',' << to_char(r.signal) << ',' << to_char(r.a1)
      << ',' << to_char(r.a2) << ',' << format_double(r.r1) << ','
      << format_double(r.r2) << ',' << format_double(r.pay1) << ','
      << format_double(r.pay2) << '\n';
}

}  // namespace

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "t,state,signal,a1,a2,r1,r2,pay1,pay2\n";
  long t = 1;
  for (const RoundRecord& r : trace.rounds) {
    out << t++ << ',';
    write_round(out, r);
  }
}

void write_batch_csv(std::ostream& out, const std::vector<RunTrace>& traces) {
  out << "run,t,state,signal,a1,a2,r1,r2,pay1,pay2\n";
  for (std::size_t run = 0; run < traces.size(); ++run) {
    long t = 1;
    for (const RoundRecord& r : traces[run].rounds) {
      out << run << ',' << t++ << ',';
      write_round(out, r);
    }
  }
}

}  // namespace steersim
