#include "ixa/controller.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "ixa/action_codec.hpp"
#include "ixa/error.hpp"
#include "ixa/query_json.hpp"

namespace ixa {

using nlohmann::json;

IndexSet IndexPlan::final_set() const {
  IndexSet set;
  for (const IndexDef& i : upfront) set.create(i);
  for (const MaybeIndex& d : decisions) {
    if (d) set.create(*d);
  }
  return set;
}

PretrainResult run_pretrain(Agent& agent, std::span<const Transition> demos,
                            const PretrainOptions& options) {
  if (demos.empty()) throw Error("pretraining needs at least one demonstration");
  PretrainResult result;
  result.demo_count = agent.import_demonstrations(demos);
  result.history = agent.pretrain(options.steps, options.eval_every, options.target_accuracy);
  result.final_accuracy =
      result.history.points.empty() ? agent.demo_accuracy() : result.history.points.back().accuracy;
  return result;
}

void write_accuracy_csv(const std::filesystem::path& path, const PretrainHistory& history) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "update,accuracy,loss_td,loss_margin\n";
  out.precision(17);
  for (const AccuracyPoint& p : history.points) {
    out << p.update << ',' << p.accuracy << ',' << p.loss_td << ',' << p.loss_margin << '\n';
  }
}

OnlineResult run_online(Controllable& agent, const std::vector<Query>& queries,
                        const Schema& schema, const Vocabulary& vocab, std::int64_t episodes,
                        const EpisodeOptions& options) {
  if (queries.empty()) throw Error("online training needs a nonempty workload");
  const std::vector<Query> ordered = order_queries(queries, options.order);
  const CollectionModel coll = options.env.collection(schema);
  OnlineResult result;
  result.weights = derive_reward_config(ordered, coll, options.k_max, options.env);
  SimulatedSystem system(coll, options.seed);

  for (std::int64_t e = 0; e < episodes; ++e) {
    system.clear();
    IndexPlan plan{ordered, {}, {}};
    double total = 0.0;
    StateTokens state = tokenize(ordered.front(), system.indexes(), vocab, options.state_length);
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      const Query& q = ordered[i];
      const double eps = agent.epsilon();
      const ActionVec action = agent.act(state, /*explore=*/true);
      const MaybeIndex index = decode_action(action, extract_attributes(q));
      const double bytes = system.act(index);
      const double seconds = system.execute(q);
      const double r = reward(seconds, bytes, result.weights);
      const bool terminal = i + 1 == ordered.size();
      StateTokens next = terminal ? state
                                  : tokenize(ordered[i + 1], system.indexes(), vocab,
                                             options.state_length);
      agent.observe(Transition{state, action, r, next, terminal, false});

      const auto loss = agent.last_loss();
      result.curve.push_back({e, static_cast<std::int64_t>(i), r, eps, loss ? loss->td : 0.0,
                              loss ? loss->margin : 0.0});
      plan.decisions.push_back(index);
      total += r;
      state = std::move(next);
    }
    result.episode_rewards.push_back(total);
    if (total > result.best.reward) result.best = BestEpisode{e, total, std::move(plan)};
    result.best_so_far.push_back(result.best.reward);
  }
  return result;
}

void write_reward_csv(const std::filesystem::path& path, const std::vector<RewardRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "episode,step,reward,epsilon,loss_td,loss_margin\n";
  out.precision(17);
  for (const RewardRow& r : rows) {
    out << r.episode << ',' << r.step << ',' << r.reward << ',' << r.epsilon << ',' << r.loss_td
        << ',' << r.loss_margin << '\n';
  }
}

json to_json(const BestEpisode& best) {
  json steps = json::array();
  for (std::size_t i = 0; i < best.plan.queries.size(); ++i) {
    steps.push_back({{"query", to_json(best.plan.queries[i])},
                     {"index", to_json(best.plan.decisions[i])}});
  }
  return json{{"episode", best.episode},
              {"reward", best.reward},
              {"steps", steps},
              {"indexes", to_json(best.plan.final_set())}};
}

IndexPlan index_plan_from_json(const json& j, const std::vector<Query>& queries, QueryOrder order) {
  IndexPlan plan;
  try {
    if (j.contains("steps")) {
      for (const json& s : j.at("steps")) {
        plan.queries.push_back(query_from_json(s.at("query")));
        plan.decisions.push_back(maybe_index_from_json(s.at("index")));
      }
      return plan;
    }
    // Bare listing: every index exists before the first query runs.
    plan.queries = order_queries(queries, order);
    plan.decisions.assign(plan.queries.size(), std::nullopt);
    for (const json& i : j.at("indexes")) plan.upfront.push_back(index_from_json(i));
  } catch (const json::exception& e) {
    throw QueryError(std::string("index plan: ") + e.what());
  }
  return plan;
}

double percentile_nearest_rank(std::vector<double> samples, double pct) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());
  return samples[rank - 1];
}

EvalReport evaluate_plan(const IndexPlan& plan, const Schema& schema, int repetitions,
                         const EpisodeOptions& options) {
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (plan.queries.size() != plan.decisions.size()) throw Error("index plan is inconsistent");
  const CollectionModel coll = options.env.collection(schema);

  if (plan.queries.empty()) throw Error("index plan has no queries");

  EvalReport report;
  report.weights = derive_reward_config(plan.queries, coll, options.k_max, options.env);
  report.full_rule_bytes = index_size(full_rule_index_set(plan.queries, options.k_max), coll);

  SimulatedSystem system(coll, options.seed);
  system.clear();
  for (const IndexDef& i : plan.upfront) system.act(i);
  for (std::size_t i = 0; i < plan.queries.size(); ++i) {
    const double bytes = system.act(plan.decisions[i]);
    const double seconds = system.execute(plan.queries[i]);
    report.total_reward += reward(seconds, bytes, report.weights);
  }

  report.indexes = system.indexes();
  report.index_bytes = system.index_bytes();
  report.normalized_size = report.full_rule_bytes > 0 ? report.index_bytes / report.full_rule_bytes : 0.0;

  std::vector<double> all;
  for (const Query& q : plan.queries) {
    std::vector<double> reps;
    for (int r = 0; r < repetitions; ++r) reps.push_back(system.execute(q));
    all.insert(all.end(), reps.begin(), reps.end());
    report.per_query_latencies.push_back(std::move(reps));
  }
  double sum = 0.0;
  for (double v : all) sum += v;
  report.mean_latency = sum / static_cast<double>(all.size());
  report.p90_latency = percentile_nearest_rank(all, 90.0);
  report.p99_latency = percentile_nearest_rank(all, 99.0);
  return report;
}

IndexPlan greedy_plan(Controllable& agent, const std::vector<Query>& queries, const Schema& schema,
                      const Vocabulary& vocab, const EpisodeOptions& options) {
  IndexPlan plan{order_queries(queries, options.order), {}, {}};
  SimulatedSystem system(options.env.collection(schema), options.seed);
  for (const Query& q : plan.queries) {
    const StateTokens state = tokenize(q, system.indexes(), vocab, options.state_length);
    const MaybeIndex index = decode_action(agent.act(state, false), extract_attributes(q));
    system.act(index);
    plan.decisions.push_back(index);
  }
  return plan;
}

BaselineStrategy baseline_from_string(std::string_view s) {
  if (s == "default") return BaselineStrategy::Default;
  if (s == "full") return BaselineStrategy::Full;
  if (s == "partial") return BaselineStrategy::Partial;
  throw ConfigError("baseline strategy must be default, full or partial");
}

IndexPlan baseline_plan(BaselineStrategy strategy, const std::vector<Query>& queries,
                        const EpisodeOptions& options) {
  IndexPlan plan{order_queries(queries, options.order), {}, {}};
  IndexSet current;
  for (const Query& q : plan.queries) {
    MaybeIndex index;
    if (strategy == BaselineStrategy::Full) index = full_index_rule(q, options.k_max);
    if (strategy == BaselineStrategy::Partial) index = partial_index_rule(q, current, options.k_max);
    if (index) current.create(*index);
    plan.decisions.push_back(index);
  }
  return plan;
}

EvalReport run_baseline(BaselineStrategy strategy, const std::vector<Query>& queries,
                        const Schema& schema, int repetitions, const EpisodeOptions& options) {
  return evaluate_plan(baseline_plan(strategy, queries, options), schema, repetitions, options);
}

json to_json(const EvalReport& r, const std::string& generated_at) {
  json per_query = json::array();
  for (const auto& reps : r.per_query_latencies) per_query.push_back(reps);
  return json{{"latency", {{"mean", r.mean_latency}, {"p90", r.p90_latency}, {"p99", r.p99_latency}}},
              {"index_size",
               {{"bytes", r.index_bytes},
                {"full_rule_bytes", r.full_rule_bytes},
                {"normalized", r.normalized_size}}},
              {"total_reward", r.total_reward},
              {"reward_weights", {{"omega1", r.weights.omega_size}, {"omega2", r.weights.omega_time}}},
              {"indexes", to_json(r.indexes)},
              {"index_count", r.indexes.size()},
              {"per_query_latencies", per_query},
              {"config", r.config},
              {"generated_at", generated_at}};
}

ServeStats run_serve(Agent& agent, const Vocabulary& vocab, const Schema& schema, std::istream& in,
                     std::ostream& out, const ServeOptions& options) {
  ServeStats stats;
  IndexSet context;
  bool awaiting_feedback = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) throw QueryError("invalid JSON object");
      if (j.contains("reset")) {
        context.drop_all();
        out << json{{"reset", true}}.dump() << '\n';
      } else if (j.contains("reward")) {
        if (!options.updates) throw QueryError("reward feedback requires updates to be enabled");
        if (!awaiting_feedback) throw QueryError("reward without a preceding decision");
        agent.observe(j.at("reward").get<double>(), j.value("terminal", false));
        awaiting_feedback = false;
        ++stats.observations;
        out << json{{"observed", true}}.dump() << '\n';
      } else {
        const Query q = query_from_json(j.contains("query") ? j["query"] : j);
        validate(q, schema);
        const StateTokens state = tokenize(q, context, vocab, options.state_length);
        const MaybeIndex index = decode_action(agent.act(state, false), extract_attributes(q));
        if (index) context.create(*index);
        awaiting_feedback = true;
        ++stats.decisions;
        out << json{{"index", to_json(index)}}.dump() << '\n';
      }
    } catch (const std::exception& e) {
      ++stats.errors;
      out << json{{"error", e.what()}, {"line", line_no}}.dump() << '\n';
    }
    out.flush();
  }
  return stats;
}

}  // namespace ixa
