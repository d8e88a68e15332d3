#include "ixa/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "ixa/controller.hpp"
#include "ixa/error.hpp"
#include "ixa/query_json.hpp"
#include "ixa/workload.hpp"

namespace ixa::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- settings ------------------------------------------------------------

struct Settings {
  std::uint64_t seed = 0;
  std::size_t k_max = kDefaultMaxKeys;
  std::size_t state_length = kDefaultStateLength;
  QueryOrder order = QueryOrder::Desc;
  EnvConfig env;
  json agent = json::object();
  QueryGenConfig workload;
  std::size_t count = 1000;
  IndexRule rule = IndexRule::Full;
  std::size_t episode_length = 20;
  PretrainOptions pretrain;
  std::int64_t episodes = 100;
  int repetitions = 5;
};

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <class T>
void read_key(const json& j, const char* key, T& target, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

IndexRule rule_from_string(std::string_view s) {
  if (s == "full") return IndexRule::Full;
  if (s == "partial") return IndexRule::Partial;
  throw ConfigError("unknown index rule '" + std::string(s) + "' (expected full or partial)");
}

std::string_view to_string(IndexRule rule) { return rule == IndexRule::Full ? "full" : "partial"; }

Settings settings_from_json(const json& j) {
  check_keys(j,
             {"seed", "k_max", "state_length", "query_order", "env", "agent", "workload", "demos",
              "pretrain", "train", "evaluate"},
             "config");
  Settings s;
  read_key(j, "seed", s.seed, "config");
  read_key(j, "k_max", s.k_max, "config");
  read_key(j, "state_length", s.state_length, "config");
  if (j.contains("query_order")) {
    std::string order;
    read_key(j, "query_order", order, "config");
    s.order = query_order_from_string(order);
  }
  if (j.contains("env")) s.env = env_config_from_json(j.at("env"));
  if (j.contains("agent")) {
    if (!j.at("agent").is_object()) throw ConfigError("config.agent must be a JSON object");
    s.agent = j.at("agent");
  }
  if (j.contains("workload")) {
    const json& w = j.at("workload");
    const std::string where = "config.workload";
    check_keys(w,
               {"count", "min_attrs", "max_attrs", "p_limit", "p_sort", "p_count",
                "sort_field_prob", "limit_values"},
               where);
    read_key(w, "count", s.count, where);
    read_key(w, "min_attrs", s.workload.min_attrs, where);
    read_key(w, "max_attrs", s.workload.max_attrs, where);
    read_key(w, "p_limit", s.workload.p_limit, where);
    read_key(w, "p_sort", s.workload.p_sort, where);
    read_key(w, "p_count", s.workload.p_count, where);
    read_key(w, "sort_field_prob", s.workload.sort_field_prob, where);
    read_key(w, "limit_values", s.workload.limit_values, where);
  }
  if (j.contains("demos")) {
    const json& d = j.at("demos");
    check_keys(d, {"rule", "episode_length"}, "config.demos");
    if (d.contains("rule")) {
      std::string rule;
      read_key(d, "rule", rule, "config.demos");
      s.rule = rule_from_string(rule);
    }
    read_key(d, "episode_length", s.episode_length, "config.demos");
  }
  if (j.contains("pretrain")) {
    const json& p = j.at("pretrain");
    check_keys(p, {"steps", "eval_every", "target_accuracy"}, "config.pretrain");
    read_key(p, "steps", s.pretrain.steps, "config.pretrain");
    read_key(p, "eval_every", s.pretrain.eval_every, "config.pretrain");
    if (p.contains("target_accuracy")) {
      if (p.at("target_accuracy").is_null()) {
        s.pretrain.target_accuracy.reset();
      } else {
        double target = 0.0;
        read_key(p, "target_accuracy", target, "config.pretrain");
        s.pretrain.target_accuracy = target;
      }
    }
  }
  if (j.contains("train")) {
    check_keys(j.at("train"), {"episodes"}, "config.train");
    read_key(j.at("train"), "episodes", s.episodes, "config.train");
  }
  if (j.contains("evaluate")) {
    check_keys(j.at("evaluate"), {"repetitions"}, "config.evaluate");
    read_key(j.at("evaluate"), "repetitions", s.repetitions, "config.evaluate");
  }
  return s;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void write_json_file(const fs::path& path, const json& j) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json workload_json(const Settings& s) {
  const QueryGenConfig& w = s.workload;
  return {{"count", s.count},         {"min_attrs", w.min_attrs}, {"max_attrs", w.max_attrs},
          {"p_limit", w.p_limit},     {"p_sort", w.p_sort},       {"p_count", w.p_count},
          {"sort_field_prob", w.sort_field_prob}, {"limit_values", w.limit_values}};
}

json pretrain_json(const PretrainOptions& p) {
  return {{"steps", p.steps},
          {"eval_every", p.eval_every},
          {"target_accuracy", p.target_accuracy ? json(*p.target_accuracy) : json(nullptr)}};
}

json common_echo(const std::string& command, const Settings& s) {
  return {{"command", command},
          {"seed", s.seed},
          {"k_max", s.k_max},
          {"state_length", s.state_length},
          {"query_order", std::string(to_string(s.order))},
          {"env", to_json(s.env)}};
}

EpisodeOptions episode_options(const Settings& s) {
  EpisodeOptions eo;
  eo.k_max = s.k_max;
  eo.state_length = s.state_length;
  eo.order = s.order;
  eo.env = s.env;
  eo.seed = s.seed;
  return eo;
}

struct Context {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  std::mutex log_mutex;

  void log(const std::string& line) {
    std::lock_guard lock(log_mutex);
    err << line << '\n';
  }
  void echo(const json& config) { log("effective config: " + config.dump()); }
};

std::vector<Query> load_queries(const fs::path& path, const Schema& schema) {
  std::vector<Query> queries = read_queries(path);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    try {
      validate(queries[i], schema);
    } catch (const Error& e) {
      throw QueryError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (queries.empty()) throw Error(path.string() + " contains no queries");
  return queries;
}

AgentConfig fresh_agent_config(const Settings& s, const Vocabulary& vocab) {
  AgentConfig cfg;
  cfg.network.vocab_size = vocab.size();
  cfg.network.heads = s.k_max;
  cfg.network.input_length = s.state_length;
  cfg = agent_config_from_json(s.agent, cfg);
  if (cfg.network.vocab_size != vocab.size()) {
    throw ConfigError("agent vocab_size " + std::to_string(cfg.network.vocab_size) +
                      " differs from the schema vocabulary size " + std::to_string(vocab.size()));
  }
  if (cfg.network.heads != s.k_max) {
    throw ConfigError("agent action heads differ from k_max " + std::to_string(s.k_max));
  }
  if (cfg.network.input_length != s.state_length) {
    throw ConfigError("agent state length differs from state_length " +
                      std::to_string(s.state_length));
  }
  cfg.seed = s.seed;
  cfg.validate();
  return cfg;
}

/// Agent settings for a stored model: the model's own echo, the pretrained
/// exploration schedule, then config overrides. Adopts the model's shape.
AgentConfig model_agent_config(const ModelFile& model, Settings& s, const Vocabulary& vocab) {
  if (model.vocab.tokens() != vocab.tokens()) {
    throw ModelFormatError("model vocabulary does not match the schema vocabulary");
  }
  AgentConfig cfg;
  if (model.meta.contains("agent")) cfg = agent_config_from_json(model.meta.at("agent"));
  cfg.network = model.spec;
  cfg.exploration = ExplorationSchedule::pretrained();
  cfg = agent_config_from_json(s.agent, cfg);
  if (cfg.network.hash() != model.spec.hash()) {
    throw ConfigError("agent network settings differ from the model network " +
                      model.spec.canonical());
  }
  cfg.seed = s.seed;
  cfg.validate();
  s.k_max = model.spec.heads;
  s.state_length = model.spec.input_length;
  return cfg;
}

std::vector<Transition> load_demo_transitions(Context& ctx, const fs::path& path,
                                              const Settings& s, const Schema& schema,
                                              const Vocabulary& vocab) {
  DemoLoadResult loaded = load_demos(path, schema, s.k_max);
  for (const LineError& e : loaded.errors) {
    ctx.log(path.string() + ":" + std::to_string(e.line) + ": skipped: " + e.message);
  }
  DemoSet set = transitions_from_records(std::move(loaded.records), vocab, s.state_length, s.k_max);
  for (const std::string& reason : set.skip_reasons) ctx.log("skipped demonstration: " + reason);
  return std::move(set.transitions);
}

// ---- subcommands -----------------------------------------------------------

struct GenWorkloadArgs {
  std::optional<std::size_t> count;
  std::string out;
};

int run_gen_workload(Context& ctx, Settings s, const GenWorkloadArgs& a) {
  if (a.count) s.count = *a.count;
  s.workload.seed = s.seed;
  s.workload.validate();
  json echo = common_echo("gen-workload", s);
  echo["workload"] = workload_json(s);
  ctx.echo(echo);
  ensure_parent(a.out);
  const auto queries = gen_workload(default_schema(), s.workload, s.count, a.out);
  ctx.log("wrote " + std::to_string(queries.size()) + " queries to " + a.out);
  return kExitOk;
}

struct GenDemosArgs {
  std::string queries;
  std::string out;
  std::optional<std::string> rule;
  std::optional<std::size_t> episode_length;
  std::optional<std::string> order;
};

int run_gen_demos(Context& ctx, Settings s, const GenDemosArgs& a) {
  if (a.rule) s.rule = rule_from_string(*a.rule);
  if (a.episode_length) s.episode_length = *a.episode_length;
  if (a.order) s.order = query_order_from_string(*a.order);
  const Schema schema = default_schema();
  const Vocabulary vocab = build_vocabulary(schema);
  json echo = common_echo("gen-demos", s);
  echo["demos"] = {{"rule", std::string(to_string(s.rule))}, {"episode_length", s.episode_length}};
  ctx.echo(echo);
  DemoOptions opts;
  opts.rule = s.rule;
  opts.k_max = s.k_max;
  opts.episode_length = s.episode_length;
  opts.order = s.order;
  opts.state_length = s.state_length;
  opts.seed = s.seed;
  const DemoSet set = build_demonstrations(load_queries(a.queries, schema), opts, s.env, schema, vocab);
  ensure_parent(a.out);
  save_demos(a.out, set.records);
  ctx.log("wrote " + std::to_string(set.records.size()) + " demonstrations to " + a.out +
          (set.skipped ? " (" + std::to_string(set.skipped) + " skipped)" : ""));
  return kExitOk;
}

struct PretrainArgs {
  std::string demos;
  std::string out;
  std::optional<std::string> curve;
  std::optional<std::string> agent;
  std::optional<std::int64_t> steps;
  std::optional<std::int64_t> eval_every;
  std::optional<double> target_accuracy;
  bool no_early_stop = false;
};

int run_pretrain_cmd(Context& ctx, Settings s, const PretrainArgs& a) {
  if (a.agent) s.agent.merge_patch(read_json_file(*a.agent));
  if (a.steps) s.pretrain.steps = *a.steps;
  if (a.eval_every) s.pretrain.eval_every = *a.eval_every;
  if (a.target_accuracy) s.pretrain.target_accuracy = *a.target_accuracy;
  if (a.no_early_stop) s.pretrain.target_accuracy.reset();
  if (s.pretrain.steps < 1 || s.pretrain.eval_every < 1) {
    throw ConfigError("pretrain steps and eval_every must be at least 1");
  }
  const Schema schema = default_schema();
  const Vocabulary vocab = build_vocabulary(schema);
  const AgentConfig cfg = fresh_agent_config(s, vocab);
  json echo = common_echo("pretrain", s);
  echo["agent"] = to_json(cfg);
  echo["pretrain"] = pretrain_json(s.pretrain);
  ctx.echo(echo);

  const auto demos = load_demo_transitions(ctx, a.demos, s, schema, vocab);
  if (demos.empty()) throw Error("no usable demonstrations in " + a.demos);
  Agent agent(cfg);
  const PretrainResult result = run_pretrain(agent, demos, s.pretrain);

  const fs::path curve =
      a.curve ? fs::path(*a.curve) : fs::path(a.out).replace_extension(".accuracy.csv");
  ensure_parent(curve);
  write_accuracy_csv(curve, result.history);
  json meta = {{"stage", "pretrain"},
               {"agent", to_json(cfg)},
               {"config", echo},
               {"demonstrations", result.demo_count},
               {"updates", result.history.updates},
               {"early_stopped", result.history.early_stopped},
               {"final_accuracy", result.final_accuracy}};
  ensure_parent(a.out);
  save_model(a.out, ModelFile{cfg.network, agent.params(), vocab, std::move(meta)});
  std::ostringstream msg;
  msg << "pretrained " << result.history.updates << " updates on " << result.demo_count
      << " demonstrations, accuracy " << result.final_accuracy << "; wrote " << a.out << " and "
      << curve.string();
  ctx.log(msg.str());
  return kExitOk;
}

struct TrainArgs {
  std::string queries;
  std::optional<std::string> model;
  std::optional<std::string> demos;
  std::optional<std::string> agent;
  std::optional<std::int64_t> episodes;
  std::optional<std::string> order;
  std::string out_dir = ".";
  std::optional<std::string> out_model;
  std::optional<std::string> rewards;
  std::optional<std::string> best;
  std::size_t runs = 1;
  std::size_t jobs = 1;
};

void train_one(Context& ctx, Settings s, const TrainArgs& a, const fs::path& dir) {
  const Schema schema = default_schema();
  const Vocabulary vocab = build_vocabulary(schema);
  const std::vector<Query> queries = load_queries(a.queries, schema);
  std::optional<ModelFile> model;
  if (a.model) model = load_model(*a.model);
  const AgentConfig cfg = model ? model_agent_config(*model, s, vocab) : fresh_agent_config(s, vocab);
  json echo = common_echo("train", s);
  echo["agent"] = to_json(cfg);
  echo["episodes"] = s.episodes;
  echo["pretrained"] = model.has_value();
  echo["demonstrations"] = a.demos.has_value();
  ctx.echo(echo);

  Agent agent(cfg);
  if (model) agent.load_params(model->params);
  if (a.demos) agent.import_demonstrations(load_demo_transitions(ctx, *a.demos, s, schema, vocab));
  AgentDriver driver(agent);
  const OnlineResult result =
      run_online(driver, queries, schema, vocab, s.episodes, episode_options(s));

  const fs::path rewards = a.rewards && a.runs == 1 ? fs::path(*a.rewards) : dir / "rewards.csv";
  const fs::path best = a.best && a.runs == 1 ? fs::path(*a.best) : dir / "best.json";
  const fs::path out_model =
      a.out_model && a.runs == 1 ? fs::path(*a.out_model) : dir / "trained.model";
  ensure_parent(rewards);
  write_reward_csv(rewards, result.curve);
  json best_json = to_json(result.best);
  best_json["reward_weights"] = {{"omega1", result.weights.omega_size},
                                 {"omega2", result.weights.omega_time}};
  best_json["config"] = echo;
  write_json_file(best, best_json);
  json meta = {{"stage", "train"},
               {"agent", to_json(cfg)},
               {"config", echo},
               {"episodes", s.episodes},
               {"updates", agent.updates()},
               {"best_reward", result.best.reward}};
  ensure_parent(out_model);
  save_model(out_model, ModelFile{cfg.network, agent.params(), vocab, std::move(meta)});
  std::ostringstream msg;
  msg << "seed " << s.seed << ": best episode " << result.best.episode << " reward "
      << result.best.reward << "; wrote " << rewards.string() << ", " << best.string() << ", "
      << out_model.string();
  ctx.log(msg.str());
}

int run_train(Context& ctx, Settings s, const TrainArgs& a) {
  if (a.agent) s.agent.merge_patch(read_json_file(*a.agent));
  if (a.episodes) s.episodes = *a.episodes;
  if (a.order) s.order = query_order_from_string(*a.order);
  if (s.episodes < 1) throw ConfigError("episodes must be at least 1");
  if (a.runs == 1) {
    train_one(ctx, s, a, a.out_dir);
    return kExitOk;
  }
  std::vector<std::exception_ptr> failures(a.runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < a.runs; i = next++) {
      Settings run = s;
      run.seed = s.seed + i;
      try {
        train_one(ctx, run, a, fs::path(a.out_dir) / ("run-" + std::to_string(run.seed)));
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < std::min(a.jobs, a.runs); ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return kExitOk;
}

struct EvaluateArgs {
  std::string queries;
  std::optional<std::string> best;
  std::optional<std::string> model;
  std::optional<int> repetitions;
  std::optional<std::string> order;
  std::string out = "report.json";
};

void log_report(Context& ctx, const EvalReport& r, const std::string& out) {
  std::ostringstream msg;
  msg << "mean " << r.mean_latency << " s, p90 " << r.p90_latency << " s, p99 " << r.p99_latency
      << " s, normalized size " << r.normalized_size << ", reward " << r.total_reward
      << "; wrote " << out;
  ctx.log(msg.str());
}

int run_evaluate(Context& ctx, Settings s, const EvaluateArgs& a) {
  if (a.best.has_value() == a.model.has_value()) {
    throw UsageError("evaluate needs exactly one of --best or --model");
  }
  if (a.repetitions) s.repetitions = *a.repetitions;
  if (a.order) s.order = query_order_from_string(*a.order);
  if (s.repetitions < 1) throw ConfigError("repetitions must be at least 1");
  const Schema schema = default_schema();
  const Vocabulary vocab = build_vocabulary(schema);
  const std::vector<Query> queries = load_queries(a.queries, schema);

  IndexPlan plan;
  json echo;
  if (a.best) {
    echo = common_echo("evaluate", s);
    echo["repetitions"] = s.repetitions;
    echo["source"] = "best";
    ctx.echo(echo);
    plan = index_plan_from_json(read_json_file(*a.best), queries, s.order);
  } else {
    const ModelFile model = load_model(*a.model);
    const AgentConfig cfg = model_agent_config(model, s, vocab);
    echo = common_echo("evaluate", s);
    echo["repetitions"] = s.repetitions;
    echo["source"] = "model";
    echo["agent"] = to_json(cfg);
    ctx.echo(echo);
    Agent agent(cfg);
    agent.load_params(model.params);
    AgentDriver driver(agent);
    plan = greedy_plan(driver, queries, schema, vocab, episode_options(s));
  }
  EvalReport report = evaluate_plan(plan, schema, s.repetitions, episode_options(s));
  report.config = echo;
  write_json_file(a.out, to_json(report, utc_timestamp()));
  log_report(ctx, report, a.out);
  return kExitOk;
}

struct BaselineArgs {
  std::string queries;
  std::string strategy;
  std::optional<int> repetitions;
  std::optional<std::string> order;
  std::optional<std::string> out;
};

int run_baseline_cmd(Context& ctx, Settings s, const BaselineArgs& a) {
  const BaselineStrategy strategy = baseline_from_string(a.strategy);
  if (a.repetitions) s.repetitions = *a.repetitions;
  if (a.order) s.order = query_order_from_string(*a.order);
  if (s.repetitions < 1) throw ConfigError("repetitions must be at least 1");
  const Schema schema = default_schema();
  json echo = common_echo("baseline", s);
  echo["strategy"] = a.strategy;
  echo["repetitions"] = s.repetitions;
  ctx.echo(echo);
  EvalReport report = run_baseline(strategy, load_queries(a.queries, schema), schema,
                                   s.repetitions, episode_options(s));
  report.config = echo;
  const std::string out = a.out.value_or("baseline_" + a.strategy + ".json");
  write_json_file(out, to_json(report, utc_timestamp()));
  log_report(ctx, report, out);
  return kExitOk;
}

struct ServeArgs {
  std::string model;
  bool updates = false;
};

int run_serve_cmd(Context& ctx, Settings s, const ServeArgs& a) {
  const Schema schema = default_schema();
  const Vocabulary vocab = build_vocabulary(schema);
  const ModelFile model = load_model(a.model);
  const AgentConfig cfg = model_agent_config(model, s, vocab);
  json echo = common_echo("serve", s);
  echo["agent"] = to_json(cfg);
  echo["updates"] = a.updates;
  ctx.echo(echo);
  Agent agent(cfg);
  agent.load_params(model.params);
  ServeOptions opts;
  opts.updates = a.updates;
  opts.k_max = s.k_max;
  opts.state_length = s.state_length;
  const ServeStats stats = run_serve(agent, vocab, schema, ctx.in, ctx.out, opts);
  ctx.log("served " + std::to_string(stats.decisions) + " decisions, " +
          std::to_string(stats.errors) + " errors, " + std::to_string(stats.observations) +
          " observations");
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Compound index advisor: deep Q-learning from demonstrations against a simulated "
               "document-store planner",
               "ixa"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::string config_path;
  app.add_option("--seed", seed, "Seed for every random stream");
  app.add_option("--config", config_path, "JSON config file (flags take precedence)")
      ->check(CLI::ExistingFile);

  const std::vector<std::string> orders = {"asc", "desc", "none"};

  GenWorkloadArgs gw;
  auto* gw_cmd = app.add_subcommand("gen-workload", "Generate a synthetic query workload (JSONL)");
  gw_cmd->add_option("--count", gw.count, "Number of queries")->check(CLI::PositiveNumber);
  gw_cmd->add_option("--out", gw.out, "Output JSONL path")->required();

  GenDemosArgs gd;
  auto* gd_cmd = app.add_subcommand("gen-demos", "Generate rule demonstrations from a workload");
  gd_cmd->add_option("--queries", gd.queries, "Workload JSONL")->required()->check(CLI::ExistingFile);
  gd_cmd->add_option("--out", gd.out, "Output demonstrations JSONL")->required();
  gd_cmd->add_option("--rule", gd.rule, "Index rule")->check(CLI::IsMember({"full", "partial"}));
  gd_cmd->add_option("--episode-length", gd.episode_length, "Queries per demonstration episode")
      ->check(CLI::PositiveNumber);
  gd_cmd->add_option("--query-order", gd.order, "Episode query order")->check(CLI::IsMember(orders));

  PretrainArgs pt;
  auto* pt_cmd = app.add_subcommand("pretrain", "Pretrain a model on demonstrations");
  pt_cmd->add_option("--demos", pt.demos, "Demonstrations JSONL")->required()->check(CLI::ExistingFile);
  pt_cmd->add_option("--out", pt.out, "Output model file")->required();
  pt_cmd->add_option("--curve", pt.curve, "Accuracy curve CSV (default <out>.accuracy.csv)");
  pt_cmd->add_option("--agent", pt.agent, "Agent config JSON")->check(CLI::ExistingFile);
  pt_cmd->add_option("--steps", pt.steps, "Maximum updates")->check(CLI::PositiveNumber);
  pt_cmd->add_option("--eval-every", pt.eval_every, "Updates between accuracy evaluations")
      ->check(CLI::PositiveNumber);
  auto* target_opt = pt_cmd->add_option("--target-accuracy", pt.target_accuracy,
                                        "Early-stop accuracy")->check(CLI::Range(0.0, 1.0));
  pt_cmd->add_flag("--no-early-stop", pt.no_early_stop, "Run all steps")->excludes(target_opt);

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Online training over a query set");
  tr_cmd->add_option("--queries", tr.queries, "Test workload JSONL")->required()->check(CLI::ExistingFile);
  tr_cmd->add_option("--model", tr.model, "Pretrained model (omit to train from scratch)")
      ->check(CLI::ExistingFile);
  tr_cmd->add_option("--demos", tr.demos, "Demonstrations kept in the demo memory")
      ->check(CLI::ExistingFile);
  tr_cmd->add_option("--agent", tr.agent, "Agent config JSON")->check(CLI::ExistingFile);
  tr_cmd->add_option("--episodes", tr.episodes, "Training episodes")->check(CLI::PositiveNumber);
  tr_cmd->add_option("--query-order", tr.order, "Episode query order")->check(CLI::IsMember(orders));
  tr_cmd->add_option("--out-dir", tr.out_dir, "Directory for outputs")->capture_default_str();
  tr_cmd->add_option("--out-model", tr.out_model, "Refined model path");
  tr_cmd->add_option("--rewards", tr.rewards, "Reward curve CSV path");
  tr_cmd->add_option("--best", tr.best, "Best episode JSON path");
  tr_cmd->add_option("--runs", tr.runs, "Independent runs with seeds seed..seed+runs-1")
      ->check(CLI::PositiveNumber);
  tr_cmd->add_option("--jobs", tr.jobs, "Runs executed concurrently")->check(CLI::PositiveNumber);

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Evaluate a best index set or a model");
  ev_cmd->add_option("--queries", ev.queries, "Workload JSONL")->required()->check(CLI::ExistingFile);
  auto* best_opt = ev_cmd->add_option("--best", ev.best, "Best episode or index listing JSON")
                       ->check(CLI::ExistingFile);
  ev_cmd->add_option("--model", ev.model, "Model to derive a greedy index set from")
      ->check(CLI::ExistingFile)
      ->excludes(best_opt);
  ev_cmd->add_option("--repetitions", ev.repetitions, "Runs per query")->check(CLI::PositiveNumber);
  ev_cmd->add_option("--query-order", ev.order, "Episode query order")->check(CLI::IsMember(orders));
  ev_cmd->add_option("--out", ev.out, "Report JSON path")->capture_default_str();

  BaselineArgs bl;
  auto* bl_cmd = app.add_subcommand("baseline", "Evaluate a rule-based index set");
  bl_cmd->add_option("--queries", bl.queries, "Workload JSONL")->required()->check(CLI::ExistingFile);
  bl_cmd->add_option("--strategy", bl.strategy, "Baseline strategy")
      ->required()
      ->check(CLI::IsMember({"default", "full", "partial"}));
  bl_cmd->add_option("--repetitions", bl.repetitions, "Runs per query")->check(CLI::PositiveNumber);
  bl_cmd->add_option("--query-order", bl.order, "Episode query order")->check(CLI::IsMember(orders));
  bl_cmd->add_option("--out", bl.out, "Report JSON path (default baseline_<strategy>.json)");

  ServeArgs sv;
  auto* sv_cmd = app.add_subcommand("serve", "Answer index requests on stdin with a model");
  sv_cmd->add_option("--model", sv.model, "Model file")->required()->check(CLI::ExistingFile);
  sv_cmd->add_flag("--updates", sv.updates, "Learn from reward lines on the stream");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Context ctx{in, out, err, {}};
  try {
    Settings s = config_path.empty() ? Settings{} : settings_from_json(read_json_file(config_path));
    if (seed) s.seed = *seed;
    if (gw_cmd->parsed()) return run_gen_workload(ctx, s, gw);
    if (gd_cmd->parsed()) return run_gen_demos(ctx, s, gd);
    if (pt_cmd->parsed()) return run_pretrain_cmd(ctx, s, pt);
    if (tr_cmd->parsed()) return run_train(ctx, s, tr);
    if (ev_cmd->parsed()) return run_evaluate(ctx, s, ev);
    if (bl_cmd->parsed()) return run_baseline_cmd(ctx, s, bl);
    if (sv_cmd->parsed()) return run_serve_cmd(ctx, s, sv);
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cin, std::cout, std::cerr);
}

}  // namespace ixa::cli
