#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "ixa/query.hpp"
#include "ixa/schema.hpp"

namespace ixa {

using Rng = std::mt19937_64;

/// 15 attributes f0..f14: six strings, six integers of different ranges,
/// two dates and one string array.
Schema default_schema();

struct QueryGenConfig {
  int min_attrs = 1;
  int max_attrs = 3;
  double p_limit = 0.10;
  double p_sort = 0.45;
  double p_count = 0.45;
  double sort_field_prob = 0.5;
  std::vector<std::int64_t> limit_values = {10, 20, 50, 100};
  std::uint64_t seed = 0;

  /// Throws ConfigError.
  void validate() const;
};

/// String literal for value number `k` of attribute `attr`.
std::string string_value(const Attribute& attr, std::int64_t k);

Query gen_query(const Schema& schema, const QueryGenConfig& cfg, Rng& rng);

/// `count` independent queries from an rng seeded with cfg.seed.
std::vector<Query> gen_workload(const Schema& schema, const QueryGenConfig& cfg, std::size_t count);

/// Same, also written as JSONL. Throws IoError.
std::vector<Query> gen_workload(const Schema& schema, const QueryGenConfig& cfg, std::size_t count,
                                const std::filesystem::path& out);

}  // namespace ixa
