#include "steersim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace steersim {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw ConfigError(message);
}

double require_number(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_number()) fail("field '" + key + "' must be a number");
  return v.get<double>();
}

long require_integer(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer()) fail("field '" + key + "' must be an integer");
  return v.get<long>();
}

std::string require_string(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_string()) fail("field '" + key + "' must be a string");
  return v.get<std::string>();
}

bool require_bool(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_boolean()) fail("field '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::vector<double> require_number_array(const json& doc,
                                         const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_array()) fail("field '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) fail("field '" + key + "' must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void reject_unknown_keys(const json& doc, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : doc.items()) {
    if (!allowed.count(item.key()))
      fail("unknown key '" + item.key() + "'" +
           (where.empty() ? "" : " in " + where));
  }
}

Action parse_action_literal(const std::string& s, const std::string& key) {
  if (s == "I") return Action::Invest;
  if (s == "N") return Action::NotInvest;
  fail("field '" + key + "' entries must be \"I\" or \"N\"");
}

StackelbergCase classify_follower(const FollowerStrategy& f) {
  auto is_full = [](double a, double g) { return a == 1.0 && g == 1.0; };
  bool g_full = is_full(f.alpha_g, f.gamma_g);
  bool b_full = is_full(f.alpha_b, f.gamma_b);
  if (g_full && b_full) return StackelbergCase::Case4;
  if (g_full) return StackelbergCase::Case3;
  if (b_full) return StackelbergCase::Case2;
  return StackelbergCase::Case1;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::uint64_t ExperimentConfig::semantic_hash() const {
  ordered_json e = echo();
  e.erase("name");  // output naming, not result semantics
  return fnv1a64(e.dump());
}

ordered_json ExperimentConfig::echo() const {
  ordered_json e;
  e["name"] = name;
  e["psi"] = params.psi;
  if (params.features) {
    e["f1"] = params.features->f1;
    e["f2"] = params.features->f2;
    e["phi"] = to_string(params.features->phi);
    e["phi_scale"] = params.features->phi_scale;
    e["phi_offset"] = params.features->phi_offset;
    e["resolved_z"] = params.z;
  } else {
    e["z"] = params.z;
  }
  e["y_G"] = params.y_good;
  e["y_B"] = params.y_bad;
  e["M"] = payment_m;
  e["target"] = {std::string(1, to_char(target.a1)),
                 std::string(1, to_char(target.a2))};
  if (policy) {
    e["alpha"] = policy->alpha;
    e["beta"] = policy->beta;
  } else {
    e["policy"] = "derive_from_se";
  }
  e["eta"] = eta;
  e["gamma"] = gamma;
  e["beta_bias"] = beta_bias;
  e["learner_mode"] = learner_mode == LearnerMode::Fixed ? "fixed" : "theory";
  e["confidence"] = confidence;
  e["T"] = horizon;
  e["runs"] = runs;
  e["floor"] = floor;
  e["seed"] = seed;
  e["arms"] = arms;
  e["stride"] = stride;
  e["se_eta"] = se_eta;
  e["se_selection"] =
      se_selection == StackelbergOptions::Selection::Case2 ? "case2" : "case3";
  if (se_pinned) {
    e["se_pinned"] = {
        {"alpha", se_pinned->policy.alpha},
        {"beta", se_pinned->policy.beta},
        {"follower",
         {se_pinned->follower.alpha_g, se_pinned->follower.gamma_g,
          se_pinned->follower.alpha_b, se_pinned->follower.gamma_b}}};
  }
  if (gamma_frac) e["gamma_frac"] = *gamma_frac;
  e["raw_regret"] = raw_regret;
  return e;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) fail("config is not valid JSON");
  if (!doc.is_object()) fail("config must be a JSON object");

  static const std::set<std::string> kKeys{
      "name", "psi", "z", "f1", "f2", "phi", "phi_scale", "phi_offset",
      "y_G", "y_B", "M", "target", "alpha", "beta", "eta", "gamma",
      "beta_bias", "learner_mode", "confidence", "T", "runs", "floor",
      "seed", "arms", "stride", "se_eta", "se_selection", "se_pinned",
      "gamma_frac", "raw_regret"};
  reject_unknown_keys(doc, kKeys, "");

  for (const char* key : {"psi", "y_G", "y_B", "M"})
    if (!doc.contains(key)) fail(std::string("missing required field '") + key + "'");

  ExperimentConfig cfg;

  double psi = require_number(doc, "psi");
  if (!(psi > 0.0 && psi < 1.0))
    fail("field 'psi' must lie strictly inside (0, 1)");
  double y_good = require_number(doc, "y_G");
  if (!(y_good > 0.0)) fail("field 'y_G' must be positive");
  double y_bad = require_number(doc, "y_B");
  if (!(y_bad < 0.0)) fail("field 'y_B' must be negative");

  bool has_z = doc.contains("z");
  bool has_features = doc.contains("f1") || doc.contains("f2");
  if (has_z == has_features)
    fail("exactly one of 'z' or feature vectors 'f1'/'f2' must be given");
  if (!has_features)
    for (const char* key : {"phi", "phi_scale", "phi_offset"})
      if (doc.contains(key))
        fail(std::string("field '") + key + "' requires feature vectors");

  if (has_z) {
    double z = require_number(doc, "z");
    if (!(z >= 0.0)) fail("field 'z' must be >= 0");
    cfg.params = GameParams::direct(psi, z, y_good, y_bad);
  } else {
    if (!doc.contains("f1") || !doc.contains("f2"))
      fail("feature vectors 'f1' and 'f2' must be provided together");
    FeatureExternality f;
    f.f1 = require_number_array(doc, "f1");
    f.f2 = require_number_array(doc, "f2");
    if (f.f1.size() != f.f2.size())
      fail("fields 'f1' and 'f2' must have the same dimension");
    if (doc.contains("phi")) {
      try {
        f.phi = phi_from_name(require_string(doc, "phi"));
      } catch (const std::invalid_argument& e) {
        fail(std::string("field 'phi': ") + e.what());
      }
    }
    if (doc.contains("phi_scale")) {
      f.phi_scale = require_number(doc, "phi_scale");
      if (!(f.phi_scale > 0.0)) fail("field 'phi_scale' must be positive");
    }
    if (doc.contains("phi_offset")) f.phi_offset = require_number(doc, "phi_offset");
    GameParams probe;
    probe.psi = psi;
    probe.y_good = y_good;
    probe.y_bad = y_bad;
    probe.features = f;
    double z = resolve_externality(probe);
    if (!(z >= 0.0))
      fail("resolved externality is negative; adjust the feature map");
    try {
      cfg.params = GameParams::from_features(psi, std::move(f), y_good, y_bad);
    } catch (const std::invalid_argument& e) {
      fail(std::string("feature externality: ") + e.what());
    }
  }

  cfg.payment_m = require_number(doc, "M");
  if (!(cfg.payment_m >= 0.0)) fail("field 'M' must be >= 0");

  if (doc.contains("target")) {
    const json& t = doc.at("target");
    if (!t.is_array() || t.size() != 2)
      fail("field 'target' must be a two-element array");
    for (const json& e : t)
      if (!e.is_string()) fail("field 'target' entries must be \"I\" or \"N\"");
    cfg.target = {parse_action_literal(t[0].get<std::string>(), "target"),
                  parse_action_literal(t[1].get<std::string>(), "target")};
  }

  bool has_alpha = doc.contains("alpha");
  bool has_beta = doc.contains("beta");
  if (has_alpha != has_beta)
    fail("fields 'alpha' and 'beta' must be provided together");
  if (has_alpha) {
    SignalingPolicy p;
    p.alpha = require_number(doc, "alpha");
    p.beta = require_number(doc, "beta");
    if (!(p.alpha >= 0.0 && p.alpha <= 1.0))
      fail("field 'alpha' must lie in [0, 1]");
    if (!(p.beta >= 0.0 && p.beta <= 1.0))
      fail("field 'beta' must lie in [0, 1]");
    cfg.policy = p;
  }

  if (doc.contains("eta")) {
    cfg.eta = require_number(doc, "eta");
    if (!(cfg.eta > 0.0)) fail("field 'eta' must be positive");
  }
  if (doc.contains("gamma")) {
    cfg.gamma = require_number(doc, "gamma");
    if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0))
      fail("field 'gamma' must lie in [0, 1]");
  }
  if (doc.contains("beta_bias")) {
    cfg.beta_bias = require_number(doc, "beta_bias");
    if (!(cfg.beta_bias >= 0.0 && cfg.beta_bias <= 1.0))
      fail("field 'beta_bias' must lie in [0, 1]");
  }
  if (doc.contains("learner_mode")) {
    std::string mode = require_string(doc, "learner_mode");
    if (mode == "fixed") cfg.learner_mode = LearnerMode::Fixed;
    else if (mode == "theory") cfg.learner_mode = LearnerMode::Theory;
    else fail("field 'learner_mode' must be \"fixed\" or \"theory\"");
  }
  if (doc.contains("confidence")) {
    cfg.confidence = require_number(doc, "confidence");
    if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0))
      fail("field 'confidence' must lie in (0, 1)");
  }
  if (doc.contains("T")) {
    cfg.horizon = require_integer(doc, "T");
    if (cfg.horizon < 1) fail("field 'T' must be >= 1");
  }
  if (doc.contains("runs")) {
    long runs = require_integer(doc, "runs");
    if (runs < 1) fail("field 'runs' must be >= 1");
    cfg.runs = static_cast<int>(runs);
  }
  if (doc.contains("floor")) {
    cfg.floor = require_number(doc, "floor");
    if (!(cfg.floor > 0.0 && cfg.floor < 0.5))
      fail("field 'floor' must lie in (0, 0.5)");
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (s.is_number_unsigned()) cfg.seed = s.get<std::uint64_t>();
    else if (s.is_number_integer() && s.get<long long>() >= 0)
      cfg.seed = static_cast<std::uint64_t>(s.get<long long>());
    else fail("field 'seed' must be a nonnegative integer");
  }
  if (doc.contains("arms")) {
    const json& a = doc.at("arms");
    if (!a.is_array() || a.empty())
      fail("field 'arms' must be a nonempty array");
    cfg.arms.clear();
    for (const json& e : a) {
      if (!e.is_string() ||
          (e.get<std::string>() != "regular" && e.get<std::string>() != "se"))
        fail("field 'arms' entries must be \"regular\" or \"se\"");
      std::string arm = e.get<std::string>();
      if (std::find(cfg.arms.begin(), cfg.arms.end(), arm) != cfg.arms.end())
        fail("field 'arms' lists '" + arm + "' twice");
      cfg.arms.push_back(arm);
    }
  }
  if (doc.contains("stride")) {
    cfg.stride = require_integer(doc, "stride");
    if (cfg.stride < 1) fail("field 'stride' must be >= 1");
  }
  if (doc.contains("name")) {
    cfg.name = require_string(doc, "name");
    if (cfg.name.empty()) fail("field 'name' must be nonempty");
  }
  if (doc.contains("se_eta")) {
    cfg.se_eta = require_number(doc, "se_eta");
    if (!(cfg.se_eta >= 0.0 && cfg.se_eta <= 1.0))
      fail("field 'se_eta' must lie in [0, 1]");
  }
  if (doc.contains("se_selection")) {
    std::string sel = require_string(doc, "se_selection");
    if (sel == "case2")
      cfg.se_selection = StackelbergOptions::Selection::Case2;
    else if (sel == "case3")
      cfg.se_selection = StackelbergOptions::Selection::Case3;
    else fail("field 'se_selection' must be \"case2\" or \"case3\"");
  }
  if (doc.contains("se_pinned")) {
    const json& p = doc.at("se_pinned");
    if (!p.is_object()) fail("field 'se_pinned' must be an object");
    reject_unknown_keys(p, {"alpha", "beta", "follower"}, "'se_pinned'");
    for (const char* key : {"alpha", "beta", "follower"})
      if (!p.contains(key))
        fail(std::string("field 'se_pinned' needs '") + key + "'");
    PinnedSe pinned;
    pinned.policy.alpha = require_number(p, "alpha");
    pinned.policy.beta = require_number(p, "beta");
    if (!(pinned.policy.alpha >= 0.0 && pinned.policy.alpha <= 1.0) ||
        !(pinned.policy.beta >= 0.0 && pinned.policy.beta <= 1.0))
      fail("field 'se_pinned' policy entries must lie in [0, 1]");
    std::vector<double> f = require_number_array(p, "follower");
    if (f.size() != 4)
      fail("field 'se_pinned.follower' must have four entries");
    pinned.follower = {f[0], f[1], f[2], f[3]};
    if (!pinned.follower.feasible())
      fail("field 'se_pinned.follower' is not a feasible strategy");
    cfg.se_pinned = pinned;
  }
  if (doc.contains("gamma_frac")) {
    double g = require_number(doc, "gamma_frac");
    if (!(g >= 0.0)) fail("field 'gamma_frac' must be >= 0");
    cfg.gamma_frac = g;
  }
  if (doc.contains("raw_regret")) cfg.raw_regret = require_bool(doc, "raw_regret");

  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

// Everything the aggregation needs from one finished run.
struct RunProduct {
  std::vector<double> delta;
  std::vector<double> regret;  // max over the two players, per round
  std::vector<double> payment;
  long not_led_rounds = 0;
};

struct Accumulator {
  std::vector<double> sum, sumsq;
  void init(std::size_t n) {
    sum.assign(n, 0.0);
    sumsq.assign(n, 0.0);
  }
  void add(const std::vector<double>& x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      sum[i] += x[i];
      sumsq[i] += x[i] * x[i];
    }
  }
};

void finalize(const Accumulator& acc, int runs, std::vector<double>& mean,
              std::vector<double>& stdev) {
  std::size_t n = acc.sum.size();
  mean.resize(n);
  stdev.resize(n);
  double r = static_cast<double>(runs);
  for (std::size_t i = 0; i < n; ++i) {
    double m = acc.sum[i] / r;
    mean[i] = m;
    double var = acc.sumsq[i] / r - m * m;
    stdev[i] = std::sqrt(std::max(0.0, var));
  }
}

std::string trace_file_name(const ExperimentConfig& cfg,
                            const std::string& arm, int run) {
  int width = 1;
  for (int v = cfg.runs - 1; v >= 10; v /= 10) ++width;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%0*d", width, run);
  return cfg.name + "_trace_" + arm + "_" + buf + ".csv";
}

ArmTable execute_arm(const ExperimentConfig& cfg, const std::string& arm,
                     const StackelbergSolution* se, const RunOptions& options) {
  RunConfig rc;
  rc.params = cfg.params;
  rc.scheme = cfg.scheme();
  rc.policy = cfg.policy ? *cfg.policy : se->policy;
  rc.horizon = cfg.horizon;
  rc.floor = cfg.floor;
  rc.learner.num_arms = 2;
  rc.learner.learning_rate = cfg.eta;
  rc.learner.exploration = cfg.gamma;
  rc.learner.bias = cfg.beta_bias;
  rc.learner_mode = cfg.learner_mode;
  rc.confidence = cfg.confidence;
  rc.seed = cfg.seed;
  if (arm == "se") {
    rc.init_mode = InitMode::Stackelberg;
    rc.se_follower = se->follower;
  } else {
    rc.init_mode = InitMode::Uniform;
  }
  rc.validate();

  int runs = cfg.runs;
  int threads = options.num_threads;
  if (threads <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    threads = static_cast<int>(hw == 0 ? 1 : hw);
  }
  threads = std::min(threads, runs);

  ArmTable table;
  table.arm = arm;
  table.horizon = cfg.horizon;
  table.runs = runs;
  table.final_delta_per_run.resize(runs);
  table.final_regret_per_run.resize(runs);

  std::size_t n = static_cast<std::size_t>(cfg.horizon);
  Accumulator acc_delta, acc_regret;
  acc_delta.init(n);
  acc_regret.init(n);
  std::vector<double> sum_payment(n, 0.0);
  long total_not_led = 0;

  // Folding happens strictly in run order so results do not depend on the
  // thread count.
  std::vector<std::unique_ptr<RunProduct>> pending(runs);
  std::mutex mu;
  int next_fold = 0;
  std::atomic<int> next_run{0};
  std::exception_ptr error;

  auto make_product = [&](int r) {
    RunConfig run_cfg = rc;
    run_cfg.seed = run_seed(cfg.seed, static_cast<std::uint64_t>(r));
    RunTrace trace = run_episode(run_cfg);
    if (options.dump_traces) {
      fs::path path = fs::path(options.trace_dir) / trace_file_name(cfg, arm, r);
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + path.string());
      write_trace_csv(out, trace);
    }
    bool use_modified = !cfg.raw_regret;
    MetricSeries s0 = compute_metric_series(trace, 0, use_modified);
    MetricSeries s1 = compute_metric_series(trace, 1, use_modified);
    auto product = std::make_unique<RunProduct>();
    product->delta = std::move(s0.directness_gap);
    product->regret.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      product->regret[i] = std::max(s0.overall_regret[i], s1.overall_regret[i]);
    product->payment = std::move(s0.avg_payment);
    if (se) {
      for (const RoundRecord& round : trace.rounds) {
        double alpha_s = round.signal == Signal::Good ? se->follower.alpha_g
                                                      : se->follower.alpha_b;
        if (std::fabs(alpha_s - 1.0) > 1e-12) ++product->not_led_rounds;
      }
    }
    return product;
  };

  auto worker = [&] {
    for (;;) {
      int r = next_run.fetch_add(1);
      if (r >= runs) return;
      std::unique_ptr<RunProduct> product;
      try {
        product = make_product(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        return;
      }
      std::lock_guard<std::mutex> lock(mu);
      pending[r] = std::move(product);
      while (next_fold < runs && pending[next_fold]) {
        RunProduct& p = *pending[next_fold];
        acc_delta.add(p.delta);
        acc_regret.add(p.regret);
        for (std::size_t i = 0; i < n; ++i) sum_payment[i] += p.payment[i];
        total_not_led += p.not_led_rounds;
        table.final_delta_per_run[next_fold] = p.delta.back();
        table.final_regret_per_run[next_fold] = p.regret.back();
        pending[next_fold].reset();
        ++next_fold;
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  finalize(acc_delta, runs, table.delta_mean, table.delta_std);
  finalize(acc_regret, runs, table.regret_mean, table.regret_std);
  table.payment_avg.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    table.payment_avg[i] = sum_payment[i] / static_cast<double>(runs);

  table.frac_not_led =
      static_cast<double>(total_not_led) /
      (static_cast<double>(runs) * static_cast<double>(cfg.horizon));

  if (arm == "se") {
    table.gamma_frac_used =
        cfg.gamma_frac ? *cfg.gamma_frac : table.frac_not_led * std::log(2.0);
    table.bound = gap_bound_curve(cfg.horizon, 2, cfg.confidence, cfg.params,
                                  cfg.scheme(), BoundMode::SeInitiated,
                                  table.gamma_frac_used);
  } else {
    table.bound = gap_bound_curve(cfg.horizon, 2, cfg.confidence, cfg.params,
                                  cfg.scheme(), BoundMode::Regular);
  }
  return table;
}

}  // namespace

StackelbergSolution resolve_se(const ExperimentConfig& cfg) {
  if (cfg.se_pinned) {
    StackelbergSolution s;
    s.policy = cfg.se_pinned->policy;
    s.follower = cfg.se_pinned->follower;
    s.case_label = classify_follower(s.follower);
    s.mediator_utility = mediator_utility(s.policy, s.follower, cfg.params);
    return s;
  }
  StackelbergOptions opts;
  opts.eta_free = cfg.se_eta;
  opts.selection = cfg.se_selection;
  try {
    return solve_stackelberg(cfg.params, opts);
  } catch (const std::exception& e) {
    fail(std::string("equilibrium solve failed: ") + e.what());
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const RunOptions& options) {
  ExperimentResult result;
  result.config = cfg;

  double margin = kappa(cfg.params, cfg.scheme());
  if (!(margin > 0.0))
    fail("kappa = " + format_double(margin) +
         " is not positive; steering requires M > " +
         format_double(-(cfg.params.z + cfg.params.y_bad)));
  if (!(cfg.payment_m > cfg.params.z + cfg.params.y_bad)) {
    std::string w =
        "payment M = " + format_double(cfg.payment_m) +
        " does not exceed z + y_B = " +
        format_double(cfg.params.z + cfg.params.y_bad) +
        "; proceeding because the obedience margin kappa = " +
        format_double(margin) + " is positive";
    result.warnings.push_back(w);
    std::cerr << "warning: " << w << "\n";
  }

  bool needs_se =
      !cfg.policy ||
      std::find(cfg.arms.begin(), cfg.arms.end(), "se") != cfg.arms.end();
  if (needs_se) {
    result.se = resolve_se(cfg);
    if (!cfg.se_pinned && result.se->beta_clamped) {
      std::string w = "equilibrium beta formula left [0, 1] and was clamped";
      result.warnings.push_back(w);
      std::cerr << "warning: " << w << "\n";
    }
  }

  if (options.dump_traces) {
    if (options.trace_dir.empty())
      fail("trace dumping needs an output directory");
    fs::create_directories(options.trace_dir);
    if (!options.force)
      for (const std::string& arm : cfg.arms)
        for (int r = 0; r < cfg.runs; ++r) {
          fs::path p = fs::path(options.trace_dir) / trace_file_name(cfg, arm, r);
          if (fs::exists(p))
            throw std::runtime_error("refusing to overwrite " + p.string() +
                                     " (use --force)");
        }
  }

  for (const std::string& arm : cfg.arms)
    result.arms.push_back(execute_arm(
        cfg, arm, result.se ? &*result.se : nullptr, options));
  return result;
}

namespace {

void write_metric_rows(std::ostream& out, const ArmTable& t,
                       const std::string& arm_prefix, long stride) {
  long horizon = t.horizon;
  for (long tt = 1; tt <= horizon; ++tt) {
    if (!(tt == 1 || tt % stride == 0 || tt == horizon)) continue;
    std::size_t i = static_cast<std::size_t>(tt - 1);
    out << arm_prefix << tt << ',' << format_double(t.delta_mean[i]) << ','
        << format_double(t.delta_std[i]) << ','
        << format_double(t.regret_mean[i]) << ','
        << format_double(t.regret_std[i]) << ','
        << format_double(t.payment_avg[i]) << ','
        << format_double(t.bound[i]) << '\n';
  }
}

}  // namespace

void emit_plot_data(const ExperimentResult& result, const std::string& out_dir,
                    bool force) {
  const ExperimentConfig& cfg = result.config;
  fs::path dir(out_dir);
  fs::create_directories(dir);

  std::vector<fs::path> files;
  for (const ArmTable& t : result.arms)
    files.push_back(dir / (cfg.name + "_" + t.arm + ".csv"));
  files.push_back(dir / (cfg.name + "_combined.csv"));
  files.push_back(dir / (cfg.name + "_meta.json"));
  if (!force)
    for (const fs::path& p : files)
      if (fs::exists(p))
        throw std::runtime_error("refusing to overwrite " + p.string() +
                                 " (use --force)");

  for (std::size_t i = 0; i < result.arms.size(); ++i) {
    std::ofstream out(files[i], std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + files[i].string());
    out << "t,delta_mean,delta_std,regret_mean,regret_std,payment_avg,bound\n";
    write_metric_rows(out, result.arms[i], "", cfg.stride);
  }

  {
    std::ofstream out(files[result.arms.size()], std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot write " +
                               files[result.arms.size()].string());
    out << "arm,t,delta_mean,delta_std,regret_mean,regret_std,payment_avg,"
           "bound\n";
    for (const ArmTable& t : result.arms)
      write_metric_rows(out, t, t.arm + ",", cfg.stride);
  }

  ordered_json meta;
  meta["config_hash"] = hash_hex(cfg.semantic_hash());
  meta["seed"] = cfg.seed;
  meta["parameters"] = cfg.echo();
  if (result.se) meta["stackelberg"] = solution_to_json(*result.se);
  ordered_json arms_meta = ordered_json::array();
  for (const ArmTable& t : result.arms) {
    ordered_json a;
    a["arm"] = t.arm;
    a["runs"] = t.runs;
    a["frac_not_led"] = t.frac_not_led;
    if (t.arm == "se") a["gamma_frac"] = t.gamma_frac_used;
    arms_meta.push_back(a);
  }
  meta["arms"] = arms_meta;
  meta["warnings"] = result.warnings;
  std::ofstream out(files.back(), std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + files.back().string());
  out << meta.dump(2) << '\n';
}

nlohmann::ordered_json solution_to_json(const StackelbergSolution& s) {
  ordered_json j;
  j["policy"] = {{"alpha", s.policy.alpha}, {"beta", s.policy.beta}};
  j["follower"] = {{"alpha_g", s.follower.alpha_g},
                   {"gamma_g", s.follower.gamma_g},
                   {"alpha_b", s.follower.alpha_b},
                   {"gamma_b", s.follower.gamma_b}};
  j["case"] = to_string(s.case_label);
  j["mediator_utility"] = s.mediator_utility;
  j["beta_clamped"] = s.beta_clamped;
  j["alternates"] = ordered_json::array();
  for (const StackelbergSolution& alt : s.alternates)
    j["alternates"].push_back(solution_to_json(alt));
  return j;
}

nlohmann::ordered_json classify_to_json(const GameParams& params) {
  ordered_json j;
  j["regime"] = to_string(dominance_classify(params));
  ordered_json verdicts = ordered_json::array();
  for (Mechanism m : {Mechanism::InfoOnly, Mechanism::InfoPlusSublinear,
                      Mechanism::LinearPayments}) {
    SteerabilityVerdict v = steerability_classify(params, m);
    ordered_json e;
    e["mechanism"] = to_string(v.mechanism);
    e["steerable"] = v.steerable;
    e["condition_value"] = v.condition_value;
    e["note"] = v.note;
    verdicts.push_back(e);
  }
  j["verdicts"] = verdicts;
  return j;
}

}  // namespace steersim
