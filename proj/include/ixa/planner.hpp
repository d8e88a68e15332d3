#pragma once

#include <cstdint>
#include <random>

#include "ixa/index.hpp"
#include "ixa/query.hpp"
#include "ixa/schema.hpp"

namespace ixa {

/// Simulated collection: document count plus cost and size constants.
struct CollectionModel {
  std::int64_t doc_count = 1000000;
  Schema schema;
  double unit_scan_cost = 1.0;   // cost units per scanned document
  double unit_fetch_cost = 2.0;  // cost units per document fetched through an index
  double time_per_unit = 1e-6;   // seconds per cost unit
  double noise_sigma = 0.0;      // lognormal latency noise
  double range_selectivity = 1.0 / 3.0;
  double bytes_per_entry_base = 16.0;
  double bytes_per_key = 8.0;

  /// Throws ConfigError.
  void validate() const;
};

struct PlanResult {
  MaybeIndex chosen;
  std::size_t covered_prefix_len = 0;
  bool sort_served = false;
  double est_cost = 0.0;
};

/// r = -omega_size * m(I) - omega_time * t(q).
struct RewardConfig {
  double omega_size = 0.0;  // per byte
  double omega_time = 0.0;  // per second

  /// Throws ConfigError.
  void validate() const;
};

/// Fraction of documents matched, clamped to [1/N, 1].
double selectivity(const Expr& expr, const CollectionModel& coll);

/// Cost of scanning every document, including the sort penalty when the
/// query sorts.
double full_scan_cost(const Query& query, const CollectionModel& coll);

/// Minimum-cost plan over the full scan and every usable index.
PlanResult plan(const Query& query, const IndexSet& indexes, const CollectionModel& coll);

/// Simulated latency in seconds. `rng` is only drawn from when noise_sigma > 0.
double execute(const Query& query, const IndexSet& indexes, const CollectionModel& coll,
               std::mt19937_64& rng);

/// m(I) in bytes.
double index_size(const IndexSet& indexes, const CollectionModel& coll);
double index_size(const IndexDef& index, const CollectionModel& coll);

double reward(double seconds, double bytes, const RewardConfig& cfg);

}  // namespace ixa
