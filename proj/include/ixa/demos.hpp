#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ixa/replay.hpp"
#include "ixa/rules.hpp"
#include "ixa/system_model.hpp"
#include "ixa/vocabulary.hpp"

namespace ixa {

/// Order in which an episode visits its queries, by attribute count.
enum class QueryOrder { Desc, Asc, None };

QueryOrder query_order_from_string(std::string_view s);
std::string_view to_string(QueryOrder order);

/// Stable sort by attribute count.
std::vector<Query> order_queries(std::vector<Query> queries, QueryOrder order);

/// One rule decision inside a simulated episode.
struct DemonstrationRecord {
  std::int64_t episode = 0;
  std::int64_t step = 0;
  Query query;
  std::vector<IndexDef> context_indexes;  // index set before this step
  MaybeIndex action_index;
  double reward = 0.0;

  bool operator==(const DemonstrationRecord&) const = default;
};

struct DemoOptions {
  IndexRule rule = IndexRule::Full;
  std::size_t k_max = kDefaultMaxKeys;
  std::size_t episode_length = 20;
  QueryOrder order = QueryOrder::Desc;
  std::size_t state_length = kDefaultStateLength;
  std::uint64_t seed = 0;
};

struct DemoSet {
  std::vector<DemonstrationRecord> records;
  std::vector<Transition> transitions;
  std::size_t skipped = 0;
  std::vector<std::string> skip_reasons;
};

/// Splits `queries` into episodes of `episode_length`, then runs each as an
/// online episode with the rule in place of the agent: clear the index set,
/// then per query tokenize, apply the rule, create the index, execute and
/// score. Reward weights are derived per episode from its own queries.
DemoSet build_demonstrations(const std::vector<Query>& queries, const DemoOptions& options,
                             const EnvConfig& env, const Schema& schema, const Vocabulary& vocab);

/// Rebuilds transitions from records; s' is the next record of the same
/// episode, the last record of an episode is terminal. Unencodable records
/// are skipped and counted.
DemoSet transitions_from_records(std::vector<DemonstrationRecord> records, const Vocabulary& vocab,
                                 std::size_t state_length, std::size_t k_max);

nlohmann::json to_json(const DemonstrationRecord& record);
/// Throws QueryError.
DemonstrationRecord demo_record_from_json(const nlohmann::json& j);

struct LineError {
  std::size_t line = 0;
  std::string message;
};

struct DemoLoadResult {
  std::vector<DemonstrationRecord> records;
  std::vector<LineError> errors;
};

/// Throws IoError.
void save_demos(const std::filesystem::path& path, const std::vector<DemonstrationRecord>& records);

/// Lines that fail to parse or validate against `schema` (or do not encode
/// with `k_max` keys) are skipped and reported; the rest load. Throws IoError
/// only when the file cannot be opened.
DemoLoadResult load_demos(const std::filesystem::path& path, const Schema& schema,
                          std::size_t k_max = kDefaultMaxKeys);

}  // namespace ixa
