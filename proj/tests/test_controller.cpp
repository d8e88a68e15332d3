#include "doctest.h"

#include <sstream>

#include "helpers.hpp"
#include "ixa/controller.hpp"
#include "ixa/error.hpp"
#include "ixa/query_json.hpp"
#include "ixa/workload.hpp"

using namespace ixa;

namespace {

std::vector<Query> workload(std::size_t n, std::uint64_t seed) {
  QueryGenConfig cfg;
  cfg.seed = seed;
  return gen_workload(default_schema(), cfg, n);
}

// Always answers the no-op action and records what it was shown.
class NoOpStub final : public Controllable {
 public:
  ActionVec act(const StateTokens&, bool) override {
    ++acts;
    return ActionVec{{0, 0, 0}};
  }
  void observe(const Transition& t) override {
    ++observes;
    terminals.push_back(t.terminal);
    rewards.push_back(t.reward);
  }
  int acts = 0;
  int observes = 0;
  std::vector<bool> terminals;
  std::vector<double> rewards;
};

AgentConfig small_agent(const Vocabulary& vocab, std::uint64_t seed) {
  AgentConfig cfg;
  cfg.network.vocab_size = vocab.size();
  cfg.network.hidden = {{32, Activation::Relu}};
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("episodes have one act/observe per query and end terminal") {
  const Schema schema = default_schema();
  const auto qs = workload(7, 1);
  NoOpStub stub;
  const OnlineResult r = run_online(stub, qs, schema, build_vocabulary(schema), 3, {});
  CHECK(stub.acts == 21);
  CHECK(stub.observes == 21);
  for (std::size_t i = 0; i < stub.terminals.size(); ++i) CHECK(stub.terminals[i] == (i % 7 == 6));
  CHECK(r.curve.size() == 21);
  CHECK(r.episode_rewards.size() == 3);
  CHECK(r.curve[7].episode == 1);
  CHECK(r.curve[7].step == 0);
}

TEST_CASE("a no-op agent leaves the index set empty and every query pays a full scan") {
  const Schema schema = default_schema();
  const auto qs = workload(10, 2);
  NoOpStub stub;
  const EpisodeOptions opt;
  const OnlineResult r = run_online(stub, qs, schema, build_vocabulary(schema), 2, opt);
  CHECK(r.best.plan.final_set().empty());
  const CollectionModel coll = opt.env.collection(schema);
  const auto ordered = order_queries(qs, QueryOrder::Desc);
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const double scan = full_scan_cost(ordered[i], coll) * coll.time_per_unit;
    CHECK(stub.rewards[i] == doctest::Approx(-r.weights.omega_time * scan));
  }
}

TEST_CASE("best-so-far is monotone and the best plan replays to its reward") {
  const Schema schema = default_schema();
  const Vocabulary vocab = build_vocabulary(schema);
  const auto qs = workload(12, 3);
  Agent agent(small_agent(vocab, 4));
  AgentDriver driver(agent);
  const EpisodeOptions opt;
  const OnlineResult r = run_online(driver, qs, schema, vocab, 15, opt);
  REQUIRE(r.best_so_far.size() == 15);
  for (std::size_t i = 1; i < r.best_so_far.size(); ++i) CHECK(r.best_so_far[i] >= r.best_so_far[i - 1]);
  CHECK(r.best.reward == r.best_so_far.back());
  CHECK(r.episode_rewards[static_cast<std::size_t>(r.best.episode)] == r.best.reward);
  const EvalReport rep = evaluate_plan(r.best.plan, schema, 5, opt);
  CHECK(rep.total_reward == doctest::Approx(r.best.reward).epsilon(1e-12));

  const auto j = to_json(r.best);
  const IndexPlan back = index_plan_from_json(j, qs, QueryOrder::Desc);
  CHECK(back.final_set() == r.best.plan.final_set());
  CHECK(evaluate_plan(back, schema, 1, opt).total_reward == doctest::Approx(r.best.reward).epsilon(1e-12));
}

TEST_CASE("same seed gives the same training run") {
  const Schema schema = default_schema();
  const Vocabulary vocab = build_vocabulary(schema);
  const auto qs = workload(8, 5);
  Agent a(small_agent(vocab, 6));
  Agent b(small_agent(vocab, 6));
  AgentDriver da(a);
  AgentDriver db(b);
  const auto ra = run_online(da, qs, schema, vocab, 6, {});
  const auto rb = run_online(db, qs, schema, vocab, 6, {});
  CHECK(ra.episode_rewards == rb.episode_rewards);
  CHECK(a.params() == b.params());
}

TEST_CASE("sigma 0 repetitions are identical and percentiles equal single runs") {
  const Schema schema = default_schema();
  const auto qs = workload(10, 7);
  const EpisodeOptions opt;
  const EvalReport rep = run_baseline(BaselineStrategy::Full, qs, schema, 5, opt);
  REQUIRE(rep.per_query_latencies.size() == 10);
  std::vector<double> singles;
  for (const auto& reps : rep.per_query_latencies) {
    REQUIRE(reps.size() == 5);
    for (double v : reps) CHECK(v == reps[0]);
    singles.push_back(reps[0]);
  }
  CHECK(rep.p90_latency == percentile_nearest_rank(singles, 90));
  CHECK(rep.p99_latency == percentile_nearest_rank(singles, 99));
}

TEST_CASE("nearest-rank percentiles") {
  std::vector<double> v{5, 1, 4, 2, 3, 10, 9, 8, 7, 6};
  CHECK(percentile_nearest_rank(v, 90) == 9);
  CHECK(percentile_nearest_rank(v, 99) == 10);
  CHECK(percentile_nearest_rank(v, 50) == 5);
  CHECK(percentile_nearest_rank({3.0}, 99) == 3.0);
}

TEST_CASE("baselines") {
  const Schema schema = default_schema();
  const auto qs = workload(40, 8);
  const EpisodeOptions opt;
  const EvalReport def = run_baseline(BaselineStrategy::Default, qs, schema, 1, opt);
  CHECK(def.indexes.empty());
  CHECK(def.normalized_size == 0.0);
  const EvalReport full = run_baseline(BaselineStrategy::Full, qs, schema, 1, opt);
  CHECK(full.normalized_size == doctest::Approx(1.0));
  IndexSet distinct;
  for (const auto& q : qs) distinct.create(full_index_rule(q, 3));
  CHECK(full.indexes.size() == distinct.size());
  const EvalReport partial = run_baseline(BaselineStrategy::Partial, qs, schema, 1, opt);
  CHECK(partial.indexes.total_keys() <= full.indexes.total_keys());
  CHECK(full.mean_latency <= def.mean_latency);
  CHECK_THROWS_AS(baseline_from_string("magic"), ConfigError);
}

TEST_CASE("report JSON differs between runs only in generated_at") {
  const Schema schema = default_schema();
  const auto qs = workload(10, 9);
  const EvalReport rep = run_baseline(BaselineStrategy::Partial, qs, schema, 2, {});
  auto a = to_json(rep, "2020-01-01T00:00:00Z");
  auto b = to_json(rep, "2030-01-01T00:00:00Z");
  CHECK(a != b);
  a.erase("generated_at");
  b.erase("generated_at");
  CHECK(a == b);
  for (const char* key : {"latency", "index_size", "total_reward", "reward_weights", "per_query_latencies",
                          "indexes", "config"}) {
    CHECK(a.contains(key));
  }
  CHECK(a["latency"]["p99"] == rep.p99_latency);
  CHECK(a["index_size"]["normalized"] == rep.normalized_size);
}

TEST_CASE("pretraining through the controller") {
  const Schema schema = default_schema();
  const Vocabulary vocab = build_vocabulary(schema);
  const DemoSet demos = build_demonstrations(workload(60, 10), {}, EnvConfig{}, schema, vocab);
  Agent agent(small_agent(vocab, 11));
  PretrainOptions opt;
  opt.steps = 50;
  opt.eval_every = 10;
  opt.target_accuracy.reset();
  const PretrainResult r = run_pretrain(agent, demos.transitions, opt);
  CHECK(r.demo_count == 60);
  CHECK(r.history.points.size() == 5);
  CHECK(r.final_accuracy == agent.demo_accuracy());
  Agent empty(small_agent(vocab, 11));
  CHECK_THROWS_AS(run_pretrain(empty, {}, opt), Error);

  testing::TempDir dir;
  write_accuracy_csv(dir / "acc.csv", r.history);
  const std::string csv = testing::read_file(dir / "acc.csv");
  CHECK(csv.rfind("update,accuracy", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("reward CSV layout") {
  testing::TempDir dir;
  write_reward_csv(dir / "r.csv", {{0, 0, -0.5, 1.0, 0.0, 0.0}, {0, 1, -0.25, 0.9, 0.1, 0.2}});
  const std::string csv = testing::read_file(dir / "r.csv");
  CHECK(csv.rfind("episode,step,reward,epsilon,loss_td,loss_margin\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("serve answers each query line in order and survives bad lines") {
  const Schema schema = default_schema();
  const Vocabulary vocab = build_vocabulary(schema);
  Agent agent(small_agent(vocab, 12));
  const auto qs = workload(3, 13);
  std::string input;
  for (const auto& q : qs) input += to_jsonl_line(q) + "\n";
  input += "not json\n";
  input += R"({"expr": {"$eq": {"nope": 1}}})" "\n";
  input += to_jsonl_line(qs[0]) + "\n";

  auto run = [&]() {
    std::istringstream in(input);
    std::ostringstream out;
    const ServeStats s = run_serve(agent, vocab, schema, in, out, {});
    return std::make_pair(s, out.str());
  };
  const auto [stats, text] = run();
  CHECK(stats.decisions == 4);
  CHECK(stats.errors == 2);
  std::istringstream lines(text);
  std::vector<nlohmann::json> replies;
  for (std::string l; std::getline(lines, l);) replies.push_back(nlohmann::json::parse(l));
  REQUIRE(replies.size() == 6);
  for (int i : {0, 1, 2, 5}) CHECK(replies[static_cast<std::size_t>(i)].contains("index"));
  CHECK(replies[3]["line"] == 4);
  CHECK(replies[4].contains("error"));
  CHECK(run().second == text);
}

TEST_CASE("serve feeds rewards back when updates are enabled") {
  const Schema schema = default_schema();
  const Vocabulary vocab = build_vocabulary(schema);
  Agent agent(small_agent(vocab, 14));
  const auto qs = workload(2, 15);
  const std::string input = to_jsonl_line(qs[0]) + "\n" + R"({"reward": -0.5, "terminal": false})" + "\n" +
                            to_jsonl_line(qs[1]) + "\n" + R"({"reward": -0.2, "terminal": true})" + "\n" +
                            R"({"reward": -0.2})" + "\n" + R"({"reset": true})" + "\n";
  std::istringstream in(input);
  std::ostringstream out;
  ServeOptions opt;
  opt.updates = true;
  const ServeStats s = run_serve(agent, vocab, schema, in, out, opt);
  CHECK(s.decisions == 2);
  CHECK(s.observations == 2);
  CHECK(s.errors == 1);
  CHECK(agent.memories().online.size() == 2);

  std::istringstream in2(R"({"reward": -1})" "\n");
  std::ostringstream out2;
  CHECK(run_serve(agent, vocab, schema, in2, out2, {}).errors == 1);
}
