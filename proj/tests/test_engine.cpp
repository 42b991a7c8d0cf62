#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "steersim/engine.hpp"

using namespace steersim;

namespace {

RunConfig fig2_config(std::uint64_t seed, long horizon) {
  RunConfig c;
  c.params = GameParams::direct(0.7, 0.2, 1.0, -0.05);
  c.scheme = {0.24, {Action::Invest, Action::Invest}};
  c.policy = {0.7, 0.7};
  c.horizon = horizon;
  c.init_mode = InitMode::Stackelberg;
  c.se_follower = FollowerStrategy{1.0, 1.0, 1.0, 1.0};
  c.learner.learning_rate = 0.05;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("state sampling") {
  GameParams p = GameParams::direct(0.7, 0.2, 1.0, -0.05);
  GameParams boundary = p;

  boundary.psi = 1.0;
  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i)
    CHECK(sample_state(boundary, rng) == State::Good);
  boundary.psi = 0.0;
  for (int i = 0; i < 1000; ++i)
    CHECK(sample_state(boundary, rng) == State::Bad);

  SplitMix64 mc(4);
  long good = 0;
  const long n = 1000000;
  for (long i = 0; i < n; ++i)
    good += sample_state(p, mc) == State::Good ? 1 : 0;
  double freq = double(good) / double(n);
  CHECK(freq >= 0.6986);
  CHECK(freq <= 0.7014);
}

TEST_CASE("signal sampling") {
  SplitMix64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_signal(State::Good, {1.0, 0.3}, rng) == Signal::Good);
    CHECK(sample_signal(State::Bad, {0.3, 0.0}, rng) == Signal::Bad);
  }

  GameParams p = GameParams::direct(0.4, 0.2, 1.0, -0.05);
  SignalingPolicy uninformative{0.7, 0.7};
  SplitMix64 mc(6);
  long g = 0;
  const long n = 1000000;
  for (long i = 0; i < n; ++i) {
    State theta = sample_state(p, mc);
    g += sample_signal(theta, uninformative, mc) == Signal::Good ? 1 : 0;
  }
  double freq = double(g) / double(n);
  CHECK(freq >= 0.6986);
  CHECK(freq <= 0.7014);
}

TEST_CASE("initial distributions") {
  std::array<double, 2> uniform =
      build_initial_distributions(InitMode::Uniform, nullptr, 0.01);
  CHECK(uniform[0] == 0.5);
  CHECK(uniform[1] == 0.5);

  FollowerStrategy full{1.0, 1.0, 1.0, 1.0};
  std::array<double, 2> floored =
      build_initial_distributions(InitMode::Stackelberg, &full, 0.01);
  CHECK(floored[0] == 0.99);
  CHECK(floored[1] == 0.99);

  FollowerStrategy split{0.5, 0.0, 1.0, 1.0};
  std::array<double, 2> mixed =
      build_initial_distributions(InitMode::Stackelberg, &split, 0.01);
  CHECK(mixed[0] == 0.5);
  CHECK(mixed[1] == 0.99);

  std::array<double, 2> raw =
      build_initial_distributions(InitMode::Stackelberg, &full, 0.01, true);
  CHECK(raw[0] == 1.0);
  CHECK(raw[1] == 1.0);

  CHECK_THROWS_AS(
      build_initial_distributions(InitMode::Stackelberg, nullptr, 0.01),
      std::invalid_argument);
}

TEST_CASE("config validation") {
  RunConfig c = fig2_config(1, 100);
  CHECK_NOTHROW(c.validate());
  c.horizon = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = fig2_config(1, 100);
  c.floor = 0.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = fig2_config(1, 100);
  c.floor = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = fig2_config(1, 100);
  c.se_follower.reset();
  CHECK_THROWS_AS(run_episode(c), std::invalid_argument);
}

TEST_CASE("semantic hash tracks meaningful fields") {
  RunConfig a = fig2_config(9, 500);
  RunConfig b = fig2_config(9, 500);
  CHECK(a.semantic_hash() == b.semantic_hash());
  b.params.psi = 0.71;
  CHECK(a.semantic_hash() != b.semantic_hash());
  b = fig2_config(9, 500);
  b.scheme.payment_m = 0.25;
  CHECK(a.semantic_hash() != b.semantic_hash());
  b = fig2_config(9, 500);
  b.horizon = 501;
  CHECK(a.semantic_hash() != b.semantic_hash());
}

TEST_CASE("fully forced round") {
  RunConfig c = fig2_config(77, 1);
  c.params.psi = 0.9999999999999999;  // largest value below 1
  c.policy = {1.0, 0.3};
  c.allow_degenerate_init = true;
  c.learner.allow_degenerate = true;
  RunTrace trace = run_episode(c);
  REQUIRE(trace.rounds.size() == 1);
  const RoundRecord& r = trace.rounds[0];
  CHECK(r.state == State::Good);
  CHECK(r.signal == Signal::Good);
  CHECK(r.a1 == Action::Invest);
  CHECK(r.a2 == Action::Invest);
  CHECK(r.r1 == 1.44);
  CHECK(r.r2 == 1.44);
  CHECK(r.pay1 == 0.24);
  CHECK(r.pay2 == 0.24);
}

TEST_CASE("episode replay oracle") {
  // Re-run the whole protocol out of line: four substreams, four learners,
  // per-signal updates with normalized gains. Every recorded field and the
  // final learner states must match.
  RunConfig c = fig2_config(4242, 400);
  RunTrace trace = run_episode(c);
  REQUIRE(trace.rounds.size() == 400);

  std::array<double, 2> invest =
      build_initial_distributions(c.init_mode, &*c.se_follower, c.floor);
  std::array<std::array<std::optional<Exp3pLearner>, 2>, 2> learners;
  for (int player = 0; player < 2; ++player)
    for (int sig = 0; sig < 2; ++sig) {
      Exp3pConfig lc = c.learner;
      lc.initial_dist = {invest[sig], 1.0 - invest[sig]};
      learners[player][sig].emplace(lc);
    }
  SplitMix64 state_rng(stream_seed(c.seed, 0));
  SplitMix64 signal_rng(stream_seed(c.seed, 1));
  std::array<SplitMix64, 2> action_rng = {SplitMix64(stream_seed(c.seed, 2)),
                                          SplitMix64(stream_seed(c.seed, 3))};
  GainBounds bounds = gain_bounds(c.params, c.scheme);

  for (const RoundRecord& r : trace.rounds) {
    State theta = sample_state(c.params, state_rng);
    Signal s = sample_signal(theta, c.policy, signal_rng);
    int sig = s == Signal::Good ? 0 : 1;
    std::array<Action, 2> acts;
    for (int player = 0; player < 2; ++player) {
      int arm = learners[player][sig]->sample_action(action_rng[player]);
      acts[player] = arm == 0 ? Action::Invest : Action::NotInvest;
    }
    double r1 = modified_utility(acts[0], acts[1], theta, c.params, c.scheme, 0);
    double r2 = modified_utility(acts[1], acts[0], theta, c.params, c.scheme, 1);
    CHECK(r.state == theta);
    CHECK(r.signal == s);
    CHECK(r.a1 == acts[0]);
    CHECK(r.a2 == acts[1]);
    CHECK(r.r1 == r1);
    CHECK(r.r2 == r2);
    CHECK(r.pay1 == payment(acts[0], acts[1], c.scheme, 0));
    CHECK(r.pay2 == payment(acts[1], acts[0], c.scheme, 1));
    CHECK(r.r1 == payoff(acts[0], acts[1], theta, c.params) + r.pay1);
    CHECK(r.r2 == payoff(acts[1], acts[0], theta, c.params) + r.pay2);
    learners[0][sig]->update(acts[0] == Action::Invest ? 0 : 1,
                             normalize_gain(r1, bounds.lo, bounds.hi));
    learners[1][sig]->update(acts[1] == Action::Invest ? 0 : 1,
                             normalize_gain(r2, bounds.lo, bounds.hi));
  }
  for (int player = 0; player < 2; ++player)
    for (int sig = 0; sig < 2; ++sig) {
      const LearnerState& got = trace.final_learners[player][sig];
      const LearnerState& want = learners[player][sig]->state();
      CHECK(got.round == want.round);
      for (int arm = 0; arm < 2; ++arm) {
        CHECK(got.probabilities[arm] == want.probabilities[arm]);
        CHECK(got.cum_gains[arm] == want.cum_gains[arm]);
      }
    }
}

TEST_CASE("per-signal isolation") {
  RunConfig c = fig2_config(31337, 600);
  RunTrace trace = run_episode(c);
  std::array<std::array<long, 2>, 2> rounds_seen = {{{0, 0}, {0, 0}}};
  for (const RoundRecord& r : trace.rounds) {
    int sig = r.signal == Signal::Good ? 0 : 1;
    ++rounds_seen[0][sig];
    ++rounds_seen[1][sig];
  }
  for (int player = 0; player < 2; ++player)
    for (int sig = 0; sig < 2; ++sig)
      CHECK(trace.final_learners[player][sig].round == rounds_seen[player][sig]);
}

TEST_CASE("episode determinism") {
  RunConfig c = fig2_config(555, 1000);
  RunTrace a = run_episode(c);
  RunTrace b = run_episode(c);
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (size_t i = 0; i < a.rounds.size(); ++i) {
    CHECK(a.rounds[i].a1 == b.rounds[i].a1);
    CHECK(a.rounds[i].a2 == b.rounds[i].a2);
    CHECK(a.rounds[i].r1 == b.rounds[i].r1);
  }
  std::ostringstream sa, sb;
  write_trace_csv(sa, a);
  write_trace_csv(sb, b);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("batch determinism across thread counts") {
  RunConfig c = fig2_config(888, 500);
  std::vector<RunTrace> serial = run_batch(c, 6, 1);
  std::vector<RunTrace> parallel = run_batch(c, 6, 4);
  REQUIRE(serial.size() == 6);
  REQUIRE(parallel.size() == 6);
  std::ostringstream sa, sb;
  write_batch_csv(sa, serial);
  write_batch_csv(sb, parallel);
  CHECK(sa.str() == sb.str());

  // Distinct runs take distinct seeds and go their own ways.
  CHECK(serial[0].seed != serial[1].seed);
  bool any_diff = false;
  for (size_t i = 0; i < serial[0].rounds.size() && !any_diff; ++i)
    any_diff = !(serial[0].rounds[i].a1 == serial[1].rounds[i].a1) ||
               !(serial[0].rounds[i].state == serial[1].rounds[i].state);
  CHECK(any_diff);

  std::vector<RunTrace> single = run_batch(c, 1, 1);
  RunTrace direct = run_episode(c);
  // A one-run batch still goes through the seed-splitting rule.
  CHECK(single[0].seed == run_seed(c.seed, 0));
  CHECK(direct.seed == c.seed);
}

TEST_CASE("trace csv format") {
  RunConfig c = fig2_config(12, 3);
  RunTrace trace = run_episode(c);
  std::ostringstream out;
  write_trace_csv(out, trace);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "t,state,signal,a1,a2,r1,r2,pay1,pay2");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string t, state, signal, a1, a2, r1;
    std::getline(fields, t, ',');
    std::getline(fields, state, ',');
    std::getline(fields, signal, ',');
    std::getline(fields, a1, ',');
    std::getline(fields, a2, ',');
    std::getline(fields, r1, ',');
    CHECK(std::stoi(t) == rows);
    CHECK((state == "G" || state == "B"));
    CHECK((signal == "g" || signal == "b"));
    CHECK((a1 == "I" || a1 == "N"));
    CHECK((a2 == "I" || a2 == "N"));
    CHECK(std::isfinite(std::stod(r1)));
  }
  CHECK(rows == 3);

  std::ostringstream batch;
  write_batch_csv(batch, run_batch(c, 2, 1));
  std::istringstream bin(batch.str());
  REQUIRE(std::getline(bin, line));
  CHECK(line == "run,t,state,signal,a1,a2,r1,r2,pay1,pay2");
  int batch_rows = 0;
  while (std::getline(bin, line)) ++batch_rows;
  CHECK(batch_rows == 6);
}

TEST_CASE("state frequency matches the prior") {
  RunConfig c = fig2_config(2024, 100000);
  RunTrace trace = run_episode(c);
  long good = 0;
  for (const RoundRecord& r : trace.rounds)
    good += r.state == State::Good ? 1 : 0;
  CHECK(std::fabs(double(good) / 100000.0 - 0.7) <= 0.005);
}

TEST_CASE("dominant action pair takes over") {
  RunConfig c;
  c.params = GameParams::direct(0.5, 0.5, 1.0, -0.1);  // z + y_B > 0
  c.scheme = {0.0, {Action::Invest, Action::Invest}};
  c.policy = {0.7, 0.7};
  c.horizon = 10000;
  c.learner.learning_rate = 0.05;
  c.seed = 99;
  RunTrace trace = run_episode(c);
  long miss = 0;
  for (const RoundRecord& r : trace.rounds)
    miss += (r.a1 == Action::Invest && r.a2 == Action::Invest) ? 0 : 1;
  CHECK(double(miss) / 10000.0 < 0.1);
}

TEST_CASE("theory mode guards its preconditions") {
  RunConfig c = fig2_config(7, 1000);
  c.learner_mode = LearnerMode::Theory;
  CHECK_NOTHROW(run_episode(c));

  RunConfig cramped = fig2_config(7, 1);
  cramped.learner_mode = LearnerMode::Theory;
  CHECK_THROWS_AS(run_episode(cramped), std::invalid_argument);

  RunConfig flat = fig2_config(7, 1000);
  flat.learner_mode = LearnerMode::Theory;
  flat.allow_degenerate_init = true;
  flat.learner.allow_degenerate = true;
  CHECK_THROWS_AS(run_episode(flat), std::invalid_argument);
}
