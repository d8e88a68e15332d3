#include "ixa/system_model.hpp"

#include "ixa/error.hpp"
#include "ixa/rules.hpp"

namespace ixa {

using nlohmann::json;

CollectionModel EnvConfig::collection(const Schema& schema) const {
  CollectionModel coll;
  coll.doc_count = doc_count;
  coll.schema = schema;
  coll.noise_sigma = noise_sigma;
  coll.unit_scan_cost = unit_scan_cost;
  coll.unit_fetch_cost = unit_fetch_cost;
  coll.time_per_unit = time_per_unit;
  coll.validate();
  return coll;
}

EnvConfig env_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("env config must be a JSON object");
  EnvConfig cfg;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      if (key == "doc_count") {
        cfg.doc_count = it->get<std::int64_t>();
      } else if (key == "noise_sigma") {
        cfg.noise_sigma = it->get<double>();
      } else if (key == "omega1") {
        if (!it->is_null()) cfg.omega1 = it->get<double>();
      } else if (key == "omega2") {
        if (!it->is_null()) cfg.omega2 = it->get<double>();
      } else if (key == "unit_costs") {
        for (auto u = it->begin(); u != it->end(); ++u) {
          if (u.key() == "scan") {
            cfg.unit_scan_cost = u->get<double>();
          } else if (u.key() == "fetch") {
            cfg.unit_fetch_cost = u->get<double>();
          } else if (u.key() == "time_per_unit") {
            cfg.time_per_unit = u->get<double>();
          } else {
            throw ConfigError("unknown unit_costs key '" + u.key() + "'");
          }
        }
      } else {
        throw ConfigError("unknown env config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("env config: ") + e.what());
  }
  return cfg;
}

json to_json(const EnvConfig& cfg) {
  return json{{"doc_count", cfg.doc_count},
              {"noise_sigma", cfg.noise_sigma},
              {"omega1", cfg.omega1 ? json(*cfg.omega1) : json(nullptr)},
              {"omega2", cfg.omega2 ? json(*cfg.omega2) : json(nullptr)},
              {"unit_costs",
               {{"scan", cfg.unit_scan_cost},
                {"fetch", cfg.unit_fetch_cost},
                {"time_per_unit", cfg.time_per_unit}}}};
}

IndexSet full_rule_index_set(const std::vector<Query>& queries, std::size_t k_max) {
  IndexSet set;
  for (const Query& q : queries) {
    IndexDef index = full_index_rule(q, k_max);
    if (!index.keys.empty()) set.create(index);
  }
  return set;
}

RewardConfig derive_reward_config(const std::vector<Query>& queries, const CollectionModel& coll,
                                  std::size_t k_max, const EnvConfig& env) {
  if (queries.empty()) throw ConfigError("cannot derive reward weights from an empty workload");
  const double full_bytes = index_size(full_rule_index_set(queries, k_max), coll);
  double scan_seconds = 0.0;
  for (const Query& q : queries) scan_seconds += full_scan_cost(q, coll) * coll.time_per_unit;
  scan_seconds /= static_cast<double>(queries.size());

  RewardConfig cfg;
  cfg.omega_size = env.omega1.value_or(full_bytes > 0 ? 0.5 / full_bytes : 0.0);
  cfg.omega_time = env.omega2.value_or(0.5 / scan_seconds);
  cfg.validate();
  return cfg;
}

SimulatedSystem::SimulatedSystem(CollectionModel coll, std::uint64_t seed)
    : coll_(std::move(coll)), rng_(seed) {
  coll_.validate();
}

double SimulatedSystem::act(const MaybeIndex& index) {
  if (index) indexes_.create(*index);
  return index_bytes();
}

double SimulatedSystem::execute(const Query& query) {
  return ixa::execute(query, indexes_, coll_, rng_);
}

}  // namespace ixa
