#pragma once

#include <cstddef>

#include "ixa/index.hpp"
#include "ixa/query.hpp"

namespace ixa {

inline constexpr std::size_t kDefaultMaxKeys = 3;

/// Compound index over the query's attributes in extraction order, truncated
/// to `k_max` keys. Sort fields take the query's sort direction, others ASC.
IndexDef full_index_rule(const Query& query, std::size_t k_max = kDefaultMaxKeys);

/// Like full_index_rule, restricted to attributes that are not the first key
/// of an existing index. nullopt when every attribute is covered.
MaybeIndex partial_index_rule(const Query& query, const IndexSet& existing,
                              std::size_t k_max = kDefaultMaxKeys);

enum class IndexRule { Full, Partial };

MaybeIndex apply_rule(IndexRule rule, const Query& query, const IndexSet& existing,
                      std::size_t k_max);

}  // namespace ixa
