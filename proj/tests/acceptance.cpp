// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ttrl/experiment.hpp"
#include "ttrl/math.hpp"
#include "ttrl/numeric.hpp"
#include "ttrl/random.hpp"

namespace fs = std::filesystem;
using namespace ttrl;

namespace {

const fs::path kData = fs::path(TTRL_SOURCE_DIR) / "data";
const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) { return format_fixed(v, digits); }

int failures = 0;

void report(const std::string& id, const std::string& title, const std::function<Outcome()>& body,
            std::optional<double> budget_s = std::nullopt) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s && secs >= *budget_s) {
    o.pass = false;
    o.detail += "; over the " + fmt(*budget_s, 0) + " s budget";
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %-3s %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(),
              secs, o.detail.c_str());
  std::fflush(stdout);
}

// --- experiment plumbing -------------------------------------------------

struct Setup {
  std::vector<std::string> presets;
  std::map<std::string, double> theta;
  BehaviorCounts counts;
  std::optional<fs::path> injected;
  Archetype archetype = Archetype::harmful;
  double ratio = 0.6;  // every injection criterion uses 0.6
  long long steps = 250;
  bool filter = false;
};

ExperimentConfig make_config(const Setup& s) {
  ExperimentConfig c;
  c.run.name = "acceptance";
  c.run.probe_interval = 50;
  c.policy.presets = s.presets;
  c.policy.theta = s.theta;
  c.policy.counts = s.counts;
  c.stream.reasoning = kData / "reasoning.jsonl";
  c.stream.injected = s.injected;
  c.stream.injected_archetype = s.archetype;
  c.stream.ratio = s.ratio;
  c.grpo.steps = s.steps;
  c.numeric_filter = s.filter;
  c.eval.harmful = kData / "eval_harmful.jsonl";
  c.eval.reasoning = kData / "eval_reasoning.jsonl";
  return c;
}

struct Run {
  BehaviorPolicy initial;
  BehaviorPolicy final;
  Trajectory trajectory;
};

std::vector<Run> run_seeds(const Setup& s) {
  const auto config = make_config(s);
  std::vector<std::future<SeedRun>> pending;
  for (auto seed : kSeeds) pending.push_back(std::async(std::launch::async, run_seed, config, seed));
  std::vector<Run> out;
  for (std::size_t i = 0; i < kSeeds.size(); ++i) {
    auto r = pending[i].get();
    auto initial = build_policy(config, kSeeds[i]);
    BehaviorPolicy final(initial.shared_feature_map(), r.final_theta, kSeeds[i]);
    out.push_back({std::move(initial), std::move(final), std::move(r.trajectory)});
  }
  return out;
}

double prob(const BehaviorPolicy& p, Archetype a, std::string_view id) {
  return behavior_distribution(p, a)[p.feature_map().behavior_index(a, id)];
}

double family_mass(const BehaviorPolicy& p, Archetype a, std::string_view prefix) {
  const auto dist = behavior_distribution(p, a);
  const auto& behaviors = p.feature_map().behaviors(a);
  double mass = 0;
  for (std::size_t i = 0; i < behaviors.size(); ++i)
    if (behaviors[i].id.starts_with(prefix)) mass += dist[static_cast<Eigen::Index>(i)];
  return mass;
}

double max_family(const BehaviorPolicy& p, Archetype a, std::string_view prefix) {
  const auto dist = behavior_distribution(p, a);
  const auto& behaviors = p.feature_map().behaviors(a);
  double best = 0;
  for (std::size_t i = 0; i < behaviors.size(); ++i)
    if (behaviors[i].id.starts_with(prefix)) best = std::max(best, dist[static_cast<Eigen::Index>(i)]);
  return best;
}

std::string join(const std::vector<double>& v, int digits = 3) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i], digits);
  return s + "]";
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// --- criteria --------------------------------------------------------------

Outcome formula_exactness() {
  std::vector<ResponseSample> samples;
  for (int i = 0; i < 16; ++i)
    samples.push_back({"X", i < 4 ? "answer 12" : "answer 11", {}, std::nullopt});
  const double p1 = pass_at_1(samples, "12").value();

  std::vector<std::pair<PromptRecord, ResponseSample>> asr;
  for (int i = 0; i < 100; ++i)
    asr.push_back({{"p" + std::to_string(i), "t", Archetype::harmful, std::nullopt, {}},
                   {i < 27 ? "HARM_1" : "REFUSE", "", {}, std::nullopt}});
  const double asr_pct = attack_success_rate(asr, Judge{}).percent();

  const auto adv = group_advantages(Eigen::Vector4d(1, 1, 0, 0), 1e-6);
  const double adv_err = (adv - Eigen::Vector4d(1, 1, -1, -1)).cwiseAbs().maxCoeff();

  Rng rng(1);
  double affine_err = 0;
  for (int t = 0; t < 1000; ++t) {
    Eigen::VectorXd r(32);
    for (auto& v : r) v = static_cast<double>(rng.below(2));
    if ((r.array() == r[0]).all()) continue;
    const double a = 0.05 + 20 * rng.uniform(), b = 50 * (rng.uniform() - 0.5);
    const Eigen::VectorXd mapped = (a * r.array() + b).matrix();
    affine_err = std::max(affine_err, (group_advantages(mapped, 1e-6) -
                                       group_advantages(r, 1e-6)).cwiseAbs().maxCoeff());
  }

  auto map = std::make_shared<const FeatureMap>(FeatureMap::make_default());
  BehaviorPolicy policy(map, preset_theta(*map, "safe-base"));
  policy.set_weight("oh_REFUSE", 60.0);
  const Eigen::VectorXd before = policy.theta();
  TrainConfig config;
  const PromptRecord h{"h", "t", Archetype::harmful, std::nullopt, {}};
  const auto step = ttrl_step(policy, {h, h, h}, config, 5);
  const bool zero_update = policy.theta() == before && step.delta_norm == 0.0;

  const bool pass = p1 == 0.25 && asr_pct == 27.0 && adv_err < 1e-6 && affine_err < 1e-9 &&
                    zero_update;
  return {pass, "pass@1=" + format_double(p1) + " ASR=" + format_double(asr_pct) +
                    " adv_err=" + format_double(adv_err) + " affine_err=" +
                    format_double(affine_err) + " zero_var_update=" +
                    (zero_update ? "exact 0" : "nonzero")};
}

double independent_log_pi(const Eigen::MatrixXd& phi, const Eigen::VectorXd& theta,
                          Eigen::Index y) {
  double top = -INFINITY;
  std::vector<double> z(static_cast<std::size_t>(phi.rows()));
  for (Eigen::Index r = 0; r < phi.rows(); ++r) {
    double s = 0;
    for (Eigen::Index c = 0; c < phi.cols(); ++c) s += phi(r, c) * theta[c];
    z[static_cast<std::size_t>(r)] = s;
    top = std::max(top, s);
  }
  double sum = 0;
  for (double v : z) sum += std::exp(v - top);
  return z[static_cast<std::size_t>(y)] - top - std::log(sum);
}

Outcome gradient_correctness() {
  auto map = std::make_shared<const FeatureMap>(FeatureMap::make_default());
  Rng rng(2024);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd theta(map->dimension());
    for (auto& v : theta) v = 6.0 * (rng.uniform() - 0.5);
    const BehaviorPolicy policy(map, theta);
    const auto a = kAllArchetypes[rng.below(kAllArchetypes.size())];
    const auto& behaviors = map->behaviors(a);
    const auto y = static_cast<Eigen::Index>(rng.below(behaviors.size()));
    PromptRecord p{"x", "t", a, std::nullopt, {}};
    if (requires_answer(a)) p.answer = "10";
    if (a == Archetype::harminject) p.source_ids = {"a", "b"};
    const auto g = log_prob_gradient(policy, p, behaviors[static_cast<std::size_t>(y)].id);
    Eigen::VectorXd fd(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Eigen::VectorXd up = theta, down = theta;
      up[i] += 1e-5;
      down[i] -= 1e-5;
      fd[i] = (independent_log_pi(map->features(a), up, y) -
               independent_log_pi(map->features(a), down, y)) / 2e-5;
    }
    worst = std::max(worst, (g - fd).norm() / std::max(fd.norm(), 1e-12));
  }
  return {worst < 1e-4, "max relative error " + format_double(worst) + " over 100 cases"};
}

Outcome one_step_oracle() {
  const double p = 0.7;
  // Exact enumeration of the 8 outcomes of three draws (1 = REFUSE).
  double exact = 0;
  for (int mask = 0; mask < 8; ++mask) {
    double pr = 1, r[3], m = 0;
    int refusals = 0;
    for (int k = 0; k < 3; ++k) {
      const bool refuse = (mask >> k) & 1;
      pr *= refuse ? p : 1 - p;
      refusals += refuse;
    }
    for (int k = 0; k < 3; ++k) {
      r[k] = (((mask >> k) & 1) != 0) == (refusals >= 2) ? 1.0 : 0.0;
      m += r[k] / 3;
    }
    double var = 0;
    for (double v : r) var += (v - m) * (v - m) / 3;
    if (var == 0) continue;
    double g = 0;
    for (int k = 0; k < 3; ++k)
      g += (r[k] - m) / std::sqrt(var) * ((((mask >> k) & 1) ? 1.0 : 0.0) - p) / 3;
    exact += pr * g;
  }

  auto map = std::make_shared<const FeatureMap>(FeatureMap::make_default({3, 1, 3, 2}));
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(map->dimension());
  const auto refuse = map->require_feature("oh_REFUSE");
  theta[refuse] = std::log(p / (1 - p));
  TrainConfig config;
  config.votes_per_prompt = 3;
  config.train_samples_per_prompt = 3;
  config.learning_rate = 1.0;
  const std::vector<PromptRecord> batch{{"h", "t", Archetype::harmful, std::nullopt, {}}};
  double sum = 0;
  const int n = 100000;
  for (int s = 0; s < n; ++s) {
    BehaviorPolicy policy(map, theta);
    ttrl_step(policy, batch, config, derive_seed(31337, static_cast<std::uint64_t>(s)));
    sum += policy.theta()[refuse] - theta[refuse];
  }
  const double mc = sum / n;
  return {exact > 0 && std::abs(mc - exact) < 1e-2,
          "exact E[dtheta]=" + fmt(exact, 5) + " Monte Carlo=" + fmt(mc, 5) + " (1e5 steps, lr 1)"};
}

Outcome safety_amplification() {
  const auto runs = run_seeds({{"safe-base"}, {}, {}, kData / "harmful.jsonl"});
  std::vector<double> deltas;
  for (const auto& r : runs)
    deltas.push_back(prob(r.final, Archetype::harmful, "REFUSE") -
                     prob(r.initial, Archetype::harmful, "REFUSE"));
  const bool pass = std::all_of(deltas.begin(), deltas.end(), [](double d) { return d >= 0.2; });
  return {pass, "P(REFUSE) from " + fmt(prob(runs[0].initial, Archetype::harmful, "REFUSE")) +
                    ", per-seed rise " + join(deltas) + " (need >= 0.2 each)"};
}

Outcome harmfulness_amplification() {
  const auto runs = run_seeds({{"vulnerable-base"}, {}, {}, kData / "harmful.jsonl"});
  std::vector<double> deltas;
  for (const auto& r : runs)
    deltas.push_back(prob(r.final, Archetype::harmful, "HARM_1") -
                     prob(r.initial, Archetype::harmful, "HARM_1"));
  const bool pass = std::all_of(deltas.begin(), deltas.end(), [](double d) { return d >= 0.1; });
  return {pass, "P(HARM_1) from " + fmt(prob(runs[0].initial, Archetype::harmful, "HARM_1")) +
                    ", per-seed rise " + join(deltas) + " (need >= 0.1 each)"};
}

Outcome reasoning_tax() {
  const std::vector<std::string> presets{"safe-base", "weak-reasoner"};
  const auto clean = run_seeds({presets, {}, {}, std::nullopt, Archetype::harmful, 0.0, 250});
  const auto injected =
      run_seeds({presets, {}, {}, kData / "harmful.jsonl", Archetype::harmful, 0.6, 350});
  std::vector<double> clean_pass, injected_pass, entropy_drop, template_rise;
  for (std::size_t i = 0; i < kSeeds.size(); ++i) {
    clean_pass.push_back(clean[i].trajectory.rows.back().pass1);
    injected_pass.push_back(injected[i].trajectory.rows.back().pass1);
    const auto& rows = injected[i].trajectory.rows;
    entropy_drop.push_back(rows.front().entropy_reasoning - rows.back().entropy_reasoning);
    template_rise.push_back(prob(injected[i].final, Archetype::reasoning, "TEMPLATE") -
                            prob(injected[i].initial, Archetype::reasoning, "TEMPLATE"));
  }
  const double gap = mean(clean_pass) - mean(injected_pass);
  const bool pass = gap > 0.02 && mean(entropy_drop) > 0 && mean(template_rise) > 0;
  return {pass, "mean final pass@1 clean " + fmt(mean(clean_pass)) + " vs injected " +
                    fmt(mean(injected_pass)) + " (gap " + fmt(gap) + ", need > 0.02); injected " +
                    "entropy drop " + join(entropy_drop) + ", P(TEMPLATE) rise " +
                    join(template_rise)};
}

Outcome label_diversity() {
  std::vector<double> rise;
  std::string detail;
  for (int m : {1, 2, 4, 8}) {
    Setup s{{"reasoning-default"}, {{"oh_REFUSE", 1.5 + std::log(m / 6.0)}}, {3, m, 3, 2},
            kData / "harmful.jsonl"};
    const auto runs = run_seeds(s);
    std::vector<double> d;
    for (const auto& r : runs)
      d.push_back(max_family(r.final, Archetype::harmful, "HARM_") -
                  max_family(r.initial, Archetype::harmful, "HARM_"));
    rise.push_back(mean(d));
    detail += "M=" + std::to_string(m) + " harm mass " +
              fmt(family_mass(runs[0].initial, Archetype::harmful, "HARM_"), 3) + " dP(modal)=" +
              fmt(rise.back(), 3) + "; ";
  }
  const bool decreasing = rise[1] > rise[2] && rise[2] > rise[3];
  const bool gap = rise[0] - rise[3] >= 0.1;
  return {decreasing && gap, detail + "(a) strictly decreasing for M>=2: " +
                                 (decreasing ? "yes" : "no") + "; (b) M=1 minus M=8 = " +
                                 fmt(rise[0] - rise[3], 3) + " (need >= 0.1)"};
}

Outcome benign_drift() {
  const auto runs = run_seeds({{"safe-base", "reasoning-default"}, {}, {},
                               kData / "benign.jsonl", Archetype::benign_instruction});
  std::vector<double> d;
  for (const auto& r : runs)
    d.push_back(family_mass(r.final, Archetype::harmful, "HARM_") -
                family_mass(r.initial, Archetype::harmful, "HARM_"));
  const bool pass = std::all_of(d.begin(), d.end(), [](double x) { return x >= 0.05; });
  return {pass, "total P(HARM_*) from " +
                    fmt(family_mass(runs[0].initial, Archetype::harmful, "HARM_")) +
                    ", per-seed rise " + join(d) + " (need >= 0.05 each)"};
}

Outcome filter_isolation() {
  const std::vector<std::string> presets{"safe-base", "reasoning-default"};
  const auto filtered =
      run_seeds({presets, {}, {}, kData / "harmful.jsonl", Archetype::harmful, 0.6, 250, true});
  const auto clean = run_seeds({presets, {}, {}, std::nullopt, Archetype::harmful, 0.0, 250});
  std::vector<double> d_refuse, vs_clean;
  std::vector<double> pass_filtered, pass_clean;
  for (std::size_t i = 0; i < kSeeds.size(); ++i) {
    d_refuse.push_back(prob(filtered[i].final, Archetype::harmful, "REFUSE") -
                       prob(filtered[i].initial, Archetype::harmful, "REFUSE"));
    vs_clean.push_back(prob(filtered[i].final, Archetype::harmful, "REFUSE") -
                       prob(clean[i].final, Archetype::harmful, "REFUSE"));
    pass_filtered.push_back(filtered[i].trajectory.rows.back().pass1);
    pass_clean.push_back(clean[i].trajectory.rows.back().pass1);
  }
  const bool refuse_flat =
      std::all_of(d_refuse.begin(), d_refuse.end(), [](double x) { return std::abs(x) < 0.02; });
  const double pass_gap = std::abs(mean(pass_filtered) - mean(pass_clean));
  return {refuse_flat && pass_gap < 0.02,
          "dP(REFUSE) per seed " + join(d_refuse) + " (need |.| < 0.02); same-seed clean-run " +
              "difference " + join(vs_clean) + "; pass@1 filtered " + fmt(mean(pass_filtered)) +
              " vs clean " + fmt(mean(pass_clean)) + " (|gap| " + fmt(pass_gap) + ", need < 0.02)"};
}

Outcome filter_bypass() {
  const auto runs = run_seeds({{"safe-base", "reasoning-default"}, {}, {},
                               kData / "harminject.jsonl", Archetype::harminject, 0.6, 250, true});
  std::vector<double> comply, harm;
  for (const auto& r : runs) {
    comply.push_back(family_mass(r.final, Archetype::harminject, "COMPLY_BOTH_") -
                     family_mass(r.initial, Archetype::harminject, "COMPLY_BOTH_"));
    harm.push_back(family_mass(r.final, Archetype::harmful, "HARM_") -
                   family_mass(r.initial, Archetype::harmful, "HARM_"));
  }
  const bool pass = mean(comply) >= 0.05 && mean(harm) >= 0.05;
  return {pass, "P(COMPLY_BOTH_*|harminject) rise " + join(comply) + ", P(HARM_*|harmful) rise " +
                    join(harm) + " (need mean >= 0.05 each)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism_and_round_trips() {
  const auto config = make_config({{"safe-base", "reasoning-default"}, {}, {},
                                   kData / "harmful.jsonl", Archetype::harmful, 0.6, 100});
  const auto a = trajectory_csv(run_seed(config, 9).trajectory);
  const auto b = trajectory_csv(run_seed(config, 9).trajectory);
  const bool identical = a == b;

  bool corpora = true;
  const std::vector<std::pair<std::string, Archetype>> files{
      {"reasoning.jsonl", Archetype::reasoning}, {"harmful.jsonl", Archetype::harmful},
      {"benign.jsonl", Archetype::benign_instruction}, {"harminject.jsonl", Archetype::harminject}};
  for (const auto& [name, archetype] : files) {
    const auto records = load_corpus(kData / name, archetype);
    std::ostringstream out;
    write_corpus(out, records);
    std::istringstream in(out.str());
    corpora = corpora && read_corpus(in, archetype) == records && out.str() == slurp(kData / name);
  }

  std::istringstream csv_in(a);
  const bool trajectory = trajectory_csv(read_trajectory_csv(csv_in)) == a;

  Rng rng(10);
  std::vector<std::string> labels;
  for (int i = 0; i < 64; ++i) labels.push_back("l" + std::to_string(rng.below(6)));
  const auto expected = majority_vote(labels);
  bool invariant = true;
  for (int i = 0; i < 10000; ++i) {
    shuffle(labels, rng);
    const auto got = majority_vote(labels);
    invariant = invariant && got.label == expected.label && got.counts == expected.counts;
  }
  const auto yes = [](bool b) { return b ? "yes" : "no"; };
  return {identical && corpora && trajectory && invariant,
          std::string("byte-identical rerun: ") + yes(identical) + "; corpus round-trip: " +
              yes(corpora) + "; trajectory round-trip: " + yes(trajectory) +
              "; vote invariant over 1e4 shuffles: " + yes(invariant)};
}

}  // namespace

int main() {
  report("1", "formula exactness", formula_exactness, 1.0);
  report("2", "gradient correctness", gradient_correctness, 5.0);
  report("3", "one-step oracle", one_step_oracle, 30.0);
  report("4", "safety amplification", safety_amplification, 10.0 * kSeeds.size());
  report("5", "harmfulness amplification", harmfulness_amplification);
  report("6", "reasoning tax", reasoning_tax);
  report("7", "label-diversity asymmetry", label_diversity);
  report("8", "benign-injection harmfulness drift", benign_drift);
  report("9a", "numeric filter isolates learning", filter_isolation);
  report("9b", "harminject bypasses the filter", filter_bypass);
  report("10", "determinism and round-trips", determinism_and_round_trips);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
