#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "json.hpp"
#include "ixa/index.hpp"
#include "ixa/planner.hpp"
#include "ixa/query.hpp"

namespace ixa {

/// Environment settings as read from the env config JSON:
/// {"doc_count": N, "noise_sigma": s, "omega1": w1, "omega2": w2,
///  "unit_costs": {"scan": .., "fetch": .., "time_per_unit": ..}}.
/// Missing omegas are derived from the workload (see derive_reward_config).
struct EnvConfig {
  std::int64_t doc_count = 1000000;
  double noise_sigma = 0.0;
  std::optional<double> omega1;
  std::optional<double> omega2;
  double unit_scan_cost = 1.0;
  double unit_fetch_cost = 2.0;
  double time_per_unit = 1e-6;

  CollectionModel collection(const Schema& schema) const;
};

EnvConfig env_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EnvConfig& cfg);

/// Index set the Full rule builds for `queries` (one index per query over
/// all its attributes, truncated to k_max keys).
IndexSet full_rule_index_set(const std::vector<Query>& queries, std::size_t k_max);

/// omega1 = 0.5 / m(Full rule set), omega2 = 0.5 / mean full-scan latency.
/// Explicit omegas in `env` take precedence.
RewardConfig derive_reward_config(const std::vector<Query>& queries, const CollectionModel& coll,
                                  std::size_t k_max, const EnvConfig& env = {});

/// The system side of the control loop: index creation and query execution.
class SystemModel {
 public:
  virtual ~SystemModel() = default;

  virtual void clear() = 0;
  /// Creates `index` (if any); returns the resulting m(I) in bytes.
  virtual double act(const MaybeIndex& index) = 0;
  /// Latency of `query` in seconds under the current index set.
  virtual double execute(const Query& query) = 0;
  virtual const IndexSet& indexes() const = 0;
  virtual double index_bytes() const = 0;
};

/// SystemModel backed by the planner cost model.
class SimulatedSystem final : public SystemModel {
 public:
  SimulatedSystem(CollectionModel coll, std::uint64_t seed);

  void clear() override { indexes_.drop_all(); }
  double act(const MaybeIndex& index) override;
  double execute(const Query& query) override;
  const IndexSet& indexes() const override { return indexes_; }
  double index_bytes() const override { return index_size(indexes_, coll_); }

  const CollectionModel& collection() const { return coll_; }

 private:
  CollectionModel coll_;
  IndexSet indexes_;
  std::mt19937_64 rng_;
};

}  // namespace ixa
