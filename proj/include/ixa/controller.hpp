#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ixa/agent.hpp"
#include "ixa/demos.hpp"
#include "ixa/model_io.hpp"
#include "ixa/system_model.hpp"

namespace ixa {

/// The act/observe surface the episode loop drives.
class Controllable {
 public:
  virtual ~Controllable() = default;
  virtual ActionVec act(const StateTokens& state, bool explore) = 0;
  virtual void observe(const Transition& t) = 0;
  virtual double epsilon() const { return 0.0; }
  virtual std::optional<LossReport> last_loss() const { return std::nullopt; }
};

/// Adapts an Agent to Controllable without copying it.
class AgentDriver final : public Controllable {
 public:
  explicit AgentDriver(Agent& agent) : agent_(agent) {}
  ActionVec act(const StateTokens& s, bool explore) override { return agent_.act(s, explore); }
  void observe(const Transition& t) override { agent_.observe(t); }
  double epsilon() const override { return agent_.epsilon(); }
  std::optional<LossReport> last_loss() const override { return agent_.last_loss(); }

 private:
  Agent& agent_;
};

/// Settings shared by the episode-based modes.
struct EpisodeOptions {
  std::size_t k_max = kDefaultMaxKeys;
  std::size_t state_length = kDefaultStateLength;
  QueryOrder order = QueryOrder::Desc;
  EnvConfig env;
  std::uint64_t seed = 0;
};

/// Queries in the order an episode visits them and the index created at each
/// step, plus any indexes that exist before the first query.
struct IndexPlan {
  std::vector<Query> queries;
  std::vector<MaybeIndex> decisions;
  std::vector<IndexDef> upfront;

  IndexSet final_set() const;
};

// ---- pretraining -------------------------------------------------------

struct PretrainOptions {
  std::int64_t steps = 2000;
  std::int64_t eval_every = 100;
  std::optional<double> target_accuracy = 0.75;
};

struct PretrainResult {
  PretrainHistory history;
  double final_accuracy = 0.0;
  std::size_t demo_count = 0;
};

/// Imports the demonstrations into `agent` and pretrains it. Throws Error
/// when there are none.
PretrainResult run_pretrain(Agent& agent, std::span<const Transition> demos,
                            const PretrainOptions& options);

void write_accuracy_csv(const std::filesystem::path& path, const PretrainHistory& history);

// ---- online training ---------------------------------------------------

struct RewardRow {
  std::int64_t episode = 0;
  std::int64_t step = 0;
  double reward = 0.0;
  double epsilon = 0.0;
  double loss_td = 0.0;
  double loss_margin = 0.0;
};

struct BestEpisode {
  std::int64_t episode = -1;
  double reward = -INFINITY;
  IndexPlan plan;
};

struct OnlineResult {
  BestEpisode best;
  std::vector<RewardRow> curve;
  std::vector<double> episode_rewards;
  std::vector<double> best_so_far;
  RewardConfig weights;
};

/// Episodic training: each episode clears the index set, then for every query
/// tokenizes it with the current indexes, acts, creates the decoded index,
/// executes the query and observes -omega1*m(I) - omega2*t(q). Keeps the
/// episode with the highest total reward.
OnlineResult run_online(Controllable& agent, const std::vector<Query>& queries,
                        const Schema& schema, const Vocabulary& vocab, std::int64_t episodes,
                        const EpisodeOptions& options);

void write_reward_csv(const std::filesystem::path& path, const std::vector<RewardRow>& rows);

nlohmann::json to_json(const BestEpisode& best);
/// Accepts the best-episode JSON or a bare {"indexes": [...]} listing.
IndexPlan index_plan_from_json(const nlohmann::json& j, const std::vector<Query>& queries,
                               QueryOrder order);

// ---- evaluation ----------------------------------------------------------

struct EvalReport {
  double mean_latency = 0.0;
  double p90_latency = 0.0;
  double p99_latency = 0.0;
  double index_bytes = 0.0;
  double full_rule_bytes = 0.0;
  double normalized_size = 0.0;
  double total_reward = 0.0;
  std::vector<std::vector<double>> per_query_latencies;  // plan order x repetitions
  IndexSet indexes;
  RewardConfig weights;
  nlohmann::json config;
};

/// Nearest-rank percentile of unsorted samples.
double percentile_nearest_rank(std::vector<double> samples, double pct);

/// Replays the plan's episode for its reward, then runs every query
/// `repetitions` times on the final index set. Sizes are normalized by the
/// Full-rule index set of the same queries.
EvalReport evaluate_plan(const IndexPlan& plan, const Schema& schema, int repetitions,
                         const EpisodeOptions& options);

/// One exploration-free episode with the agent's greedy decisions.
IndexPlan greedy_plan(Controllable& agent, const std::vector<Query>& queries, const Schema& schema,
                      const Vocabulary& vocab, const EpisodeOptions& options);

enum class BaselineStrategy { Default, Full, Partial };
BaselineStrategy baseline_from_string(std::string_view s);

/// The rule's index decisions over one ordered episode.
IndexPlan baseline_plan(BaselineStrategy strategy, const std::vector<Query>& queries,
                        const EpisodeOptions& options);

EvalReport run_baseline(BaselineStrategy strategy, const std::vector<Query>& queries,
                        const Schema& schema, int repetitions, const EpisodeOptions& options);

/// Report JSON; `generated_at` is the only field that varies between runs.
nlohmann::json to_json(const EvalReport& report, const std::string& generated_at);

// ---- serving -------------------------------------------------------------

struct ServeOptions {
  bool updates = false;
  std::size_t k_max = kDefaultMaxKeys;
  std::size_t state_length = kDefaultStateLength;
};

struct ServeStats {
  std::size_t decisions = 0;
  std::size_t errors = 0;
  std::size_t observations = 0;
};

/// Line protocol. A query line ({"expr": .., "agg": ..}) yields
/// {"index": [[field, dir], ...] | null}. With updates enabled, a line
/// {"reward": r, "terminal": b} feeds back on the previous decision and yields
/// {"observed": true}. {"reset": true} clears the tracked index set. Bad lines
/// yield {"error": message, "line": n} and processing continues.
ServeStats run_serve(Agent& agent, const Vocabulary& vocab, const Schema& schema, std::istream& in,
                     std::ostream& out, const ServeOptions& options);

}  // namespace ixa
