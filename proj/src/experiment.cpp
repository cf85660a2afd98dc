#include "ttrl/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "ttrl/errors.hpp"
#include "ttrl/numeric.hpp"
#include "ttrl/random.hpp"

namespace ttrl {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kManifestKind = "ttrl-run-manifest";

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "must be an object");
  for (const auto& [key, _] : obj.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(join(path, key), "unknown key");
}

const json* find(const json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "must be a string");
  return v.get<std::string>();
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "must be a number");
  return v.get<double>();
}

std::uint64_t get_uint(const json& v, const std::string& path) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
    throw ConfigError(path, "must be a non-negative integer");
  return v.get<std::uint64_t>();
}

long long get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "must be an integer");
  return v.get<long long>();
}

bool get_switch(const json& v, const std::string& path) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "on") return true;
    if (s == "off") return false;
  }
  throw ConfigError(path, "must be \"on\", \"off\" or a boolean");
}

fs::path get_path(const json& v, const std::string& path, const fs::path& base, bool must_exist) {
  fs::path p = get_string(v, path);
  if (p.is_relative()) p = base / p;
  p = p.lexically_normal();
  if (must_exist && !fs::exists(p)) throw ConfigError(path, "file not found: " + p.string());
  return p;
}

std::vector<std::string> get_string_list(const json& v, const std::string& path) {
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) throw ConfigError(path, "must be a string or a list of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(get_string(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

void parse_run(const json& doc, ExperimentConfig::Run& run) {
  const std::string path = "run";
  check_keys(doc, path, {"name", "seeds", "probe_interval"});
  if (auto v = find(doc, "name")) run.name = get_string(*v, join(path, "name"));
  if (run.name.empty() || run.name.find('/') != std::string::npos)
    throw ConfigError(join(path, "name"), "must be a non-empty file-name-safe string");
  if (auto v = find(doc, "seeds")) {
    if (!v->is_array()) throw ConfigError(join(path, "seeds"), "must be a list");
    run.seeds.clear();
    for (std::size_t i = 0; i < v->size(); ++i)
      run.seeds.push_back(get_uint((*v)[i], join(path, "seeds") + "[" + std::to_string(i) + "]"));
  }
  if (run.seeds.empty()) throw ConfigError(join(path, "seeds"), "must not be empty");
  if (auto v = find(doc, "probe_interval")) run.probe_interval = get_int(*v, join(path, "probe_interval"));
  if (run.probe_interval < 1) throw ConfigError(join(path, "probe_interval"), "must be >= 1");
}

void parse_policy(const json& doc, ExperimentConfig::Policy& policy) {
  const std::string path = "policy";
  check_keys(doc, path, {"preset", "theta", "counts"});
  if (auto v = find(doc, "preset")) policy.presets = get_string_list(*v, join(path, "preset"));
  if (auto v = find(doc, "counts")) {
    const auto cpath = join(path, "counts");
    check_keys(*v, cpath, {"wrong_answers", "harm_variants", "benign_answers", "harminject_wrong"});
    auto read = [&](const char* key, int& target, int minimum) {
      if (auto c = find(*v, key)) {
        const auto n = get_int(*c, join(cpath, key));
        if (n < minimum || n > 1000)
          throw ConfigError(join(cpath, key), "must be in [" + std::to_string(minimum) + ", 1000]");
        target = static_cast<int>(n);
      }
    };
    read("wrong_answers", policy.counts.wrong_answers, 0);
    read("harm_variants", policy.counts.harm_variants, 1);
    read("benign_answers", policy.counts.benign_answers, 0);
    read("harminject_wrong", policy.counts.harminject_wrong, 0);
  }
  if (auto v = find(doc, "theta")) {
    if (!v->is_object()) throw ConfigError(join(path, "theta"), "must be an object");
    for (const auto& [feature, value] : v->items())
      policy.theta[feature] = get_number(value, join(join(path, "theta"), feature));
  }
  // Presets and overrides must resolve against the feature map.
  const auto map = FeatureMap::make_default(policy.counts);
  for (std::size_t i = 0; i < policy.presets.size(); ++i) {
    try {
      preset_theta(map, policy.presets[i]);
    } catch (const PolicyError& e) {
      throw ConfigError(join(path, "preset"), e.what());
    }
  }
  for (const auto& [feature, _] : policy.theta)
    if (!map.feature_index(feature))
      throw ConfigError(join(join(path, "theta"), feature), "unknown feature");
}

void parse_stream(const json& doc, ExperimentConfig::StreamSection& stream, const fs::path& base) {
  const std::string path = "stream";
  check_keys(doc, path, {"reasoning", "injected", "injected_archetype", "ratio", "seed"});
  const auto* reasoning = find(doc, "reasoning");
  if (!reasoning) throw ConfigError(join(path, "reasoning"), "is required");
  stream.reasoning = get_path(*reasoning, join(path, "reasoning"), base, true);
  if (auto v = find(doc, "ratio")) stream.ratio = get_number(*v, join(path, "ratio"));
  if (!(stream.ratio >= 0.0)) throw ConfigError(join(path, "ratio"), "must be >= 0");
  if (auto v = find(doc, "injected")) stream.injected = get_path(*v, join(path, "injected"), base, true);
  if (stream.ratio > 0.0 && !stream.injected)
    throw ConfigError(join(path, "injected"), "is required when ratio > 0");
  if (auto v = find(doc, "injected_archetype")) {
    const auto s = get_string(*v, join(path, "injected_archetype"));
    const auto a = parse_archetype(s);
    if (!a) throw ConfigError(join(path, "injected_archetype"), "unknown archetype " + s);
    stream.injected_archetype = *a;
  }
  if (auto v = find(doc, "seed")) stream.seed = get_uint(*v, join(path, "seed"));
}

void parse_grpo(const json& doc, TrainConfig& grpo) {
  const std::string path = "grpo";
  check_keys(doc, path, {"steps", "batch_size", "votes_per_prompt", "train_samples_per_prompt",
                         "learning_rate", "advantage_epsilon", "kl_coefficient"});
  if (auto v = find(doc, "steps")) grpo.steps = get_int(*v, join(path, "steps"));
  if (auto v = find(doc, "batch_size")) grpo.batch_size = get_uint(*v, join(path, "batch_size"));
  if (auto v = find(doc, "votes_per_prompt"))
    grpo.votes_per_prompt = get_uint(*v, join(path, "votes_per_prompt"));
  if (auto v = find(doc, "train_samples_per_prompt"))
    grpo.train_samples_per_prompt = get_uint(*v, join(path, "train_samples_per_prompt"));
  if (auto v = find(doc, "learning_rate")) grpo.learning_rate = get_number(*v, join(path, "learning_rate"));
  if (auto v = find(doc, "advantage_epsilon"))
    grpo.advantage_epsilon = get_number(*v, join(path, "advantage_epsilon"));
  if (auto v = find(doc, "kl_coefficient"))
    grpo.kl_coefficient = get_number(*v, join(path, "kl_coefficient"));

  if (grpo.steps < 0) throw ConfigError(join(path, "steps"), "must be >= 0");
  if (grpo.batch_size == 0) throw ConfigError(join(path, "batch_size"), "must be >= 1");
  if (grpo.votes_per_prompt == 0) throw ConfigError(join(path, "votes_per_prompt"), "must be >= 1");
  if (grpo.train_samples_per_prompt == 0 || grpo.train_samples_per_prompt > grpo.votes_per_prompt)
    throw ConfigError(join(path, "train_samples_per_prompt"), "must be in [1, votes_per_prompt]");
  if (!(grpo.learning_rate >= 0.0)) throw ConfigError(join(path, "learning_rate"), "must be >= 0");
  if (!(grpo.advantage_epsilon > 0.0)) throw ConfigError(join(path, "advantage_epsilon"), "must be > 0");
  if (grpo.kl_coefficient != 0.0)
    throw ConfigError(join(path, "kl_coefficient"), "only 0 is supported (no KL regularization)");
}

void parse_endpoint(const json& doc, const std::string& path, RemoteEndpoint& endpoint) {
  check_keys(doc, path, {"base_url", "model", "judge_path", "chat_path", "timeout_s", "max_attempts"});
  if (auto v = find(doc, "base_url")) endpoint.base_url = get_string(*v, join(path, "base_url"));
  if (auto v = find(doc, "model")) endpoint.model = get_string(*v, join(path, "model"));
  if (auto v = find(doc, "judge_path")) endpoint.judge_path = get_string(*v, join(path, "judge_path"));
  if (auto v = find(doc, "chat_path")) endpoint.chat_path = get_string(*v, join(path, "chat_path"));
  if (auto v = find(doc, "timeout_s"))
    endpoint.timeout = std::chrono::seconds(get_uint(*v, join(path, "timeout_s")));
  if (auto v = find(doc, "max_attempts"))
    endpoint.retry.max_attempts = static_cast<int>(std::max<std::uint64_t>(1, get_uint(*v, join(path, "max_attempts"))));
}

void parse_eval(const json& doc, ExperimentConfig::Eval& eval, const fs::path& base) {
  const std::string path = "eval";
  check_keys(doc, path, {"judge", "keywords", "harmful", "reasoning", "k", "seed", "endpoint"});
  if (auto v = find(doc, "judge")) {
    const auto s = get_string(*v, join(path, "judge"));
    const auto k = parse_judge_kind(s);
    if (!k) throw ConfigError(join(path, "judge"), "must be oracle, keyword or remote");
    eval.judge = *k;
  }
  if (auto v = find(doc, "keywords")) eval.keywords = get_string_list(*v, join(path, "keywords"));
  const auto* harmful = find(doc, "harmful");
  if (!harmful) throw ConfigError(join(path, "harmful"), "is required");
  eval.harmful = get_path(*harmful, join(path, "harmful"), base, true);
  const auto* reasoning = find(doc, "reasoning");
  if (!reasoning) throw ConfigError(join(path, "reasoning"), "is required");
  eval.reasoning = get_path(*reasoning, join(path, "reasoning"), base, true);
  if (auto v = find(doc, "k")) eval.k = get_uint(*v, join(path, "k"));
  if (eval.k == 0) throw ConfigError(join(path, "k"), "must be >= 1");
  if (auto v = find(doc, "seed")) eval.seed = get_uint(*v, join(path, "seed"));
  if (auto v = find(doc, "endpoint")) parse_endpoint(*v, join(path, "endpoint"), eval.endpoint);
  if (eval.judge == JudgeKind::remote) {
    eval.endpoint = apply_environment(eval.endpoint);
    if (eval.endpoint.base_url.empty())
      throw ConfigError(join(path, "endpoint.base_url"),
                        std::string("is required for the remote judge (or set ") + kBaseUrlEnv + ")");
  }
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

std::vector<PromptRecord> load_or_throw(const fs::path& path, Archetype a) {
  return load_corpus(path, a);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& doc, const fs::path& base_dir) {
  check_keys(doc, "", {"run", "policy", "stream", "grpo", "vote", "defense", "eval"});
  ExperimentConfig config;
  if (auto v = find(doc, "run")) parse_run(*v, config.run);
  if (auto v = find(doc, "policy")) parse_policy(*v, config.policy);
  const auto* stream = find(doc, "stream");
  if (!stream) throw ConfigError("stream", "section is required");
  parse_stream(*stream, config.stream, base_dir);
  if (auto v = find(doc, "grpo")) parse_grpo(*v, config.grpo);
  if (auto v = find(doc, "vote")) {
    check_keys(*v, "vote", {"extraction"});
    if (auto e = find(*v, "extraction")) {
      const auto s = get_string(*e, "vote.extraction");
      const auto parsed = parse_extraction(s);
      if (!parsed)
        throw ConfigError("vote.extraction",
                          "must be last_token, numeric_last or numeric_empty_fallback");
      config.extraction = *parsed;
    }
  }
  if (auto v = find(doc, "defense")) {
    check_keys(*v, "defense", {"numeric_filter"});
    if (auto f = find(*v, "numeric_filter")) config.numeric_filter = get_switch(*f, "defense.numeric_filter");
  }
  const auto* eval = find(doc, "eval");
  if (!eval) throw ConfigError("eval", "section is required");
  parse_eval(*eval, config.eval, base_dir);
  return config;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "cannot parse " + path.string() + ": " + e.what());
  }
  const auto base = fs::absolute(path).parent_path();
  if (doc.is_object() && doc.value("kind", "") == kManifestKind) {
    if (!doc.contains("config") || !doc.contains("seed"))
      throw ConfigError("", "manifest lacks config or seed");
    auto config = parse_experiment_config(doc["config"], base);
    config.run.seeds = {get_uint(doc["seed"], "seed")};
    return config;
  }
  return parse_experiment_config(doc, base);
}

nlohmann::ordered_json resolved_config(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["run"]["name"] = c.run.name;
  j["run"]["seeds"] = c.run.seeds;
  j["run"]["probe_interval"] = c.run.probe_interval;
  j["policy"]["preset"] = c.policy.presets;
  j["policy"]["theta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : c.policy.theta) j["policy"]["theta"][k] = v;
  j["policy"]["counts"] = {{"wrong_answers", c.policy.counts.wrong_answers},
                           {"harm_variants", c.policy.counts.harm_variants},
                           {"benign_answers", c.policy.counts.benign_answers},
                           {"harminject_wrong", c.policy.counts.harminject_wrong}};
  j["stream"]["reasoning"] = fs::absolute(c.stream.reasoning).string();
  if (c.stream.injected) j["stream"]["injected"] = fs::absolute(*c.stream.injected).string();
  j["stream"]["injected_archetype"] = std::string(to_string(c.stream.injected_archetype));
  j["stream"]["ratio"] = c.stream.ratio;
  if (c.stream.seed) j["stream"]["seed"] = *c.stream.seed;
  j["grpo"] = {{"steps", c.grpo.steps},
               {"batch_size", c.grpo.batch_size},
               {"votes_per_prompt", c.grpo.votes_per_prompt},
               {"train_samples_per_prompt", c.grpo.train_samples_per_prompt},
               {"learning_rate", c.grpo.learning_rate},
               {"advantage_epsilon", c.grpo.advantage_epsilon},
               {"kl_coefficient", c.grpo.kl_coefficient}};
  j["vote"]["extraction"] = std::string(to_string(c.extraction));
  j["defense"]["numeric_filter"] = c.numeric_filter ? "on" : "off";
  j["eval"]["judge"] = std::string(to_string(c.eval.judge));
  j["eval"]["keywords"] = c.eval.keywords;
  j["eval"]["harmful"] = fs::absolute(c.eval.harmful).string();
  j["eval"]["reasoning"] = fs::absolute(c.eval.reasoning).string();
  j["eval"]["k"] = c.eval.k;
  if (c.eval.seed) j["eval"]["seed"] = *c.eval.seed;
  if (c.eval.judge == JudgeKind::remote) {
    // The auth token stays in the environment and is never written out.
    j["eval"]["endpoint"] = {{"base_url", c.eval.endpoint.base_url},
                             {"model", c.eval.endpoint.model},
                             {"judge_path", c.eval.endpoint.judge_path},
                             {"chat_path", c.eval.endpoint.chat_path},
                             {"timeout_s", c.eval.endpoint.timeout.count()},
                             {"max_attempts", c.eval.endpoint.retry.max_attempts}};
  }
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  auto j = resolved_config(config);
  j["run"].erase("seeds");
  return hex64(hash_string(j.dump()));
}

BehaviorPolicy build_policy(const ExperimentConfig& config, std::uint64_t seed) {
  auto map = std::make_shared<const FeatureMap>(FeatureMap::make_default(config.policy.counts));
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(map->dimension());
  for (const auto& name : config.policy.presets) theta += preset_theta(*map, name);
  for (const auto& [feature, value] : config.policy.theta) theta[map->require_feature(feature)] += value;
  return BehaviorPolicy(std::move(map), std::move(theta), seed);
}

Stream build_stream(const ExperimentConfig& config, std::uint64_t seed) {
  const auto reasoning = load_or_throw(config.stream.reasoning, Archetype::reasoning);
  std::vector<PromptRecord> injected;
  if (config.stream.injected)
    injected = load_or_throw(*config.stream.injected, config.stream.injected_archetype);
  return mix_stream(reasoning, injected, config.stream.ratio, config.stream.seed.value_or(seed));
}

EvalProbeSet build_probes(const ExperimentConfig& config, std::uint64_t seed) {
  EvalProbeSet probes;
  probes.harmful = load_or_throw(config.eval.harmful, Archetype::harmful);
  probes.reasoning = load_or_throw(config.eval.reasoning, Archetype::reasoning);
  probes.pass_k = config.eval.k;
  probes.judge.kind = config.eval.judge;
  probes.judge.keywords = config.eval.keywords;
  probes.judge.endpoint = config.eval.endpoint;
  probes.seed = config.eval.seed.value_or(seed);
  return probes;
}

TrainConfig train_config(const ExperimentConfig& config, std::uint64_t seed) {
  TrainConfig t = config.grpo;
  t.seed = seed;
  t.extraction = config.extraction;
  t.numeric_filter = config.numeric_filter;
  t.probe_interval = config.run.probe_interval;
  return t;
}

SeedRun run_seed(const ExperimentConfig& config, std::uint64_t seed) {
  auto policy = build_policy(config, seed);
  const auto stream = build_stream(config, seed);
  const auto probes = build_probes(config, seed);
  SeedRun out;
  out.seed = seed;
  out.trajectory = run_ttrl(policy, stream, train_config(config, seed), probes);
  out.final_theta = policy.theta();
  out.stream_size = stream.size();
  out.injected = stream.injected();

  auto& meta = out.trajectory.metadata;
  meta["run"] = config.run.name;
  meta["seed"] = std::to_string(seed);
  meta["config_hash"] = config_hash(config);
  std::string presets;
  for (const auto& p : config.policy.presets) presets += (presets.empty() ? "" : "+") + p;
  meta["presets"] = presets;
  return out;
}

int run_experiment(const fs::path& config_path, const RunOptions& options, std::ostream& out,
                   std::ostream& err) {
  ExperimentConfig config;
  try {
    config = load_experiment_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  if (options.dry_run) {
    out << resolved_config(config).dump(2) << '\n';
    return kExitOk;
  }

  try {
    fs::create_directories(options.out_dir);
    const auto resolved = resolved_config(config);
    const unsigned jobs = std::max(1u, options.jobs);

    std::vector<SeedRun> results(config.run.seeds.size());
    for (std::size_t begin = 0; begin < config.run.seeds.size(); begin += jobs) {
      const auto end = std::min<std::size_t>(config.run.seeds.size(), begin + jobs);
      std::vector<std::future<SeedRun>> pending;
      for (std::size_t i = begin; i < end; ++i)
        pending.push_back(std::async(std::launch::async, run_seed, std::cref(config),
                                     config.run.seeds[i]));
      for (std::size_t i = begin; i < end; ++i) results[i] = pending[i - begin].get();
    }

    for (const auto& r : results) {
      const std::string stem = config.run.name + ".seed" + std::to_string(r.seed);
      const auto csv_path = options.out_dir / (stem + ".trajectory.csv");
      write_text(csv_path, trajectory_csv(r.trajectory));

      nlohmann::ordered_json manifest;
      manifest["kind"] = kManifestKind;
      manifest["seed"] = r.seed;
      manifest["trajectory"] = csv_path.filename().string();
      manifest["metadata"] = r.trajectory.metadata;
      manifest["stream"] = {{"records", r.stream_size}, {"injected", r.injected}};
      manifest["config"] = resolved;
      write_text(options.out_dir / (stem + ".manifest.json"), manifest.dump(2) + "\n");

      const auto& last = r.trajectory.rows.back();
      out << stem << ": steps=" << last.step << " asr=" << format_fixed(last.asr_percent, 1)
          << "% pass1=" << format_fixed(last.pass1, 4)
          << " p_refuse=" << format_fixed(last.p_refuse_harmful, 4) << " -> " << csv_path.string()
          << '\n';
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitOk;
}

int compose_command(const fs::path& jailbreak_path, const fs::path& reasoning_path,
                    const fs::path& out_path, std::uint64_t seed, double ratio, std::ostream& out,
                    std::ostream& err) {
  try {
    const auto jailbreaks = load_corpus(jailbreak_path, Archetype::harmful);
    const auto reasoning = load_corpus(reasoning_path, Archetype::reasoning);
    if (jailbreaks.size() != reasoning.size())
      err << "warning: " << jailbreaks.size() << " jailbreak and " << reasoning.size()
          << " reasoning records; composing " << std::min(jailbreaks.size(), reasoning.size())
          << " pairs\n";
    const auto composed = compose_harminject_pairs(jailbreaks, reasoning, seed);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    save_corpus(out_path, composed);

    nlohmann::ordered_json manifest;
    manifest["kind"] = "ttrl-compose-manifest";
    manifest["seed"] = seed;
    manifest["ratio"] = ratio;
    manifest["counts"] = {{"jailbreak", jailbreaks.size()},
                          {"reasoning", reasoning.size()},
                          {"composed", composed.size()},
                          {"injected_at_ratio", injected_count(reasoning.size(), ratio)}};
    manifest["inputs"] = {{"jailbreak", fs::absolute(jailbreak_path).string()},
                          {"reasoning", fs::absolute(reasoning_path).string()}};
    manifest["output"] = fs::absolute(out_path).string();
    write_text(fs::path(out_path.string() + ".manifest.json"), manifest.dump(2) + "\n");
    out << "composed " << composed.size() << " harminject records -> " << out_path.string() << '\n';
  } catch (const CorpusError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitOk;
}

int export_command(const std::vector<fs::path>& trajectories, const std::string& format,
                   const std::optional<fs::path>& out_path, std::ostream& out, std::ostream& err) {
  if (format != "csv") {
    err << "error: unsupported export format \"" << format << "\" (only csv)\n";
    return kExitConfigError;
  }
  if (trajectories.empty()) {
    err << "error: no trajectories given\n";
    return kExitConfigError;
  }
  try {
    std::vector<Trajectory> runs;
    for (const auto& p : trajectories) runs.push_back(load_trajectory_csv(p));
    const auto result = runs.size() == 1 ? runs.front() : average_trajectories(runs);
    const auto text = trajectory_csv(result);
    if (out_path)
      write_text(*out_path, text);
    else
      out << text;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitOk;
}

}  // namespace ttrl
