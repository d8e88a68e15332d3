#include "ixa/rules.hpp"

namespace ixa {

namespace {

IndexDef index_over(const Query& query, const std::vector<std::string>& fields, std::size_t k_max) {
  IndexDef index;
  for (const std::string& field : fields) {
    if (index.keys.size() == k_max) break;
    SortDirection dir = SortDirection::Asc;
    for (const SortKey& key : query.agg.sort) {
      if (key.field == field) dir = key.direction;
    }
    index.keys.push_back({field, dir});
  }
  return index;
}

}  // namespace

IndexDef full_index_rule(const Query& query, std::size_t k_max) {
  return index_over(query, extract_attributes(query), k_max);
}

MaybeIndex partial_index_rule(const Query& query, const IndexSet& existing, std::size_t k_max) {
  std::vector<std::string> uncovered;
  for (std::string& field : extract_attributes(query)) {
    if (!existing.has_first_key(field)) uncovered.push_back(std::move(field));
  }
  if (uncovered.empty()) return std::nullopt;
  return index_over(query, uncovered, k_max);
}

MaybeIndex apply_rule(IndexRule rule, const Query& query, const IndexSet& existing,
                      std::size_t k_max) {
  if (rule == IndexRule::Full) return full_index_rule(query, k_max);
  return partial_index_rule(query, existing, k_max);
}

}  // namespace ixa
