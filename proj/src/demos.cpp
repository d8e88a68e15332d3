#include "ixa/demos.hpp"

#include <algorithm>
#include <fstream>

#include "ixa/action_codec.hpp"
#include "ixa/error.hpp"
#include "ixa/query_json.hpp"
#include "ixa/tokenizer.hpp"

namespace ixa {

using nlohmann::json;

QueryOrder query_order_from_string(std::string_view s) {
  if (s == "desc") return QueryOrder::Desc;
  if (s == "asc") return QueryOrder::Asc;
  if (s == "none") return QueryOrder::None;
  throw ConfigError("query order must be asc, desc or none");
}

std::string_view to_string(QueryOrder order) {
  switch (order) {
    case QueryOrder::Desc: return "desc";
    case QueryOrder::Asc: return "asc";
    case QueryOrder::None: return "none";
  }
  return "?";
}

std::vector<Query> order_queries(std::vector<Query> queries, QueryOrder order) {
  if (order == QueryOrder::None) return queries;
  std::vector<std::pair<std::size_t, Query>> keyed;
  keyed.reserve(queries.size());
  for (Query& q : queries) keyed.emplace_back(attribute_count(q), std::move(q));
  std::stable_sort(keyed.begin(), keyed.end(), [order](const auto& a, const auto& b) {
    return order == QueryOrder::Desc ? a.first > b.first : a.first < b.first;
  });
  std::vector<Query> out;
  out.reserve(keyed.size());
  for (auto& [n, q] : keyed) out.push_back(std::move(q));
  return out;
}

DemoSet build_demonstrations(const std::vector<Query>& queries, const DemoOptions& options,
                             const EnvConfig& env, const Schema& schema, const Vocabulary& vocab) {
  if (options.episode_length < 1) throw ConfigError("episode_length must be >= 1");
  const CollectionModel coll = env.collection(schema);
  std::vector<DemonstrationRecord> records;
  records.reserve(queries.size());

  std::int64_t episode = 0;
  for (std::size_t start = 0; start < queries.size(); start += options.episode_length, ++episode) {
    const std::size_t end = std::min(queries.size(), start + options.episode_length);
    const std::vector<Query> chunk = order_queries(
        std::vector<Query>(queries.begin() + static_cast<std::ptrdiff_t>(start),
                           queries.begin() + static_cast<std::ptrdiff_t>(end)),
        options.order);
    const RewardConfig weights = derive_reward_config(chunk, coll, options.k_max, env);
    SimulatedSystem system(coll, options.seed + static_cast<std::uint64_t>(episode));
    system.clear();
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      DemonstrationRecord rec;
      rec.episode = episode;
      rec.step = static_cast<std::int64_t>(i);
      rec.query = chunk[i];
      rec.context_indexes = system.indexes().indexes();
      rec.action_index = apply_rule(options.rule, chunk[i], system.indexes(), options.k_max);
      const double bytes = system.act(rec.action_index);
      const double seconds = system.execute(chunk[i]);
      rec.reward = reward(seconds, bytes, weights);
      records.push_back(std::move(rec));
    }
  }
  return transitions_from_records(std::move(records), vocab, options.state_length, options.k_max);
}

namespace {

IndexSet as_set(const std::vector<IndexDef>& indexes) {
  IndexSet set;
  for (const IndexDef& i : indexes) set.create(i);
  return set;
}

}  // namespace

DemoSet transitions_from_records(std::vector<DemonstrationRecord> records, const Vocabulary& vocab,
                                 std::size_t state_length, std::size_t k_max) {
  DemoSet out;
  std::vector<ActionVec> actions;
  for (const DemonstrationRecord& rec : records) {
    try {
      actions.push_back(encode_action(rec.action_index, extract_attributes(rec.query), k_max));
      out.records.push_back(rec);
    } catch (const EncodingError& e) {
      ++out.skipped;
      out.skip_reasons.push_back("episode " + std::to_string(rec.episode) + " step " +
                                 std::to_string(rec.step) + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    const DemonstrationRecord& rec = out.records[i];
    Transition t;
    t.state = tokenize(rec.query, as_set(rec.context_indexes), vocab, state_length);
    t.action = actions[i];
    t.reward = rec.reward;
    t.is_demo = true;
    t.terminal = i + 1 == out.records.size() || out.records[i + 1].episode != rec.episode;
    t.next_state = t.terminal ? t.state
                              : tokenize(out.records[i + 1].query,
                                         as_set(out.records[i + 1].context_indexes), vocab,
                                         state_length);
    out.transitions.push_back(std::move(t));
  }
  return out;
}

json to_json(const DemonstrationRecord& r) {
  json context = json::array();
  for (const IndexDef& i : r.context_indexes) context.push_back(to_json(i));
  return json{{"episode", r.episode},
              {"step", r.step},
              {"query", to_json(r.query)},
              {"context_indexes", context},
              {"action_index", to_json(r.action_index)},
              {"reward", r.reward}};
}

DemonstrationRecord demo_record_from_json(const json& j) {
  if (!j.is_object()) throw QueryError("record must be an object");
  DemonstrationRecord r;
  try {
    r.episode = j.at("episode").get<std::int64_t>();
    r.step = j.at("step").get<std::int64_t>();
    r.query = query_from_json(j.at("query"));
    for (const json& i : j.at("context_indexes")) r.context_indexes.push_back(index_from_json(i));
    r.action_index = maybe_index_from_json(j.at("action_index"));
    r.reward = j.at("reward").get<double>();
  } catch (const json::exception& e) {
    throw QueryError(std::string("malformed record: ") + e.what());
  }
  return r;
}

void save_demos(const std::filesystem::path& path, const std::vector<DemonstrationRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const DemonstrationRecord& r : records) out << to_json(r).dump() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

DemoLoadResult load_demos(const std::filesystem::path& path, const Schema& schema,
                          std::size_t k_max) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  DemoLoadResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) throw QueryError("invalid JSON");
      DemonstrationRecord r = demo_record_from_json(j);
      validate(r.query, schema);
      for (const IndexDef& i : r.context_indexes) {
        validate(i, k_max);
        for (const IndexKey& k : i.keys) {
          if (!schema.contains(k.field)) throw QueryError("unknown index field '" + k.field + "'");
        }
      }
      encode_action(r.action_index, extract_attributes(r.query), k_max);
      result.records.push_back(std::move(r));
    } catch (const Error& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  return result;
}

}  // namespace ixa
