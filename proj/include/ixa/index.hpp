#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ixa/query.hpp"

namespace ixa {

struct IndexKey {
  std::string field;
  SortDirection direction = SortDirection::Asc;

  bool operator==(const IndexKey&) const = default;
  auto operator<=>(const IndexKey&) const = default;
};

/// Compound index: ordered (field, direction) keys with distinct fields.
struct IndexDef {
  std::vector<IndexKey> keys;

  bool operator==(const IndexDef&) const = default;
  auto operator<=>(const IndexDef&) const = default;
};

using MaybeIndex = std::optional<IndexDef>;

/// Throws QueryError if fields repeat or the key count is outside 1..max_keys.
void validate(const IndexDef& index, std::size_t max_keys);

std::string to_string(const IndexDef& index);

/// Set of indexes keyed by key sequence, kept in creation order.
class IndexSet {
 public:
  IndexSet() = default;

  /// Returns false if an index with the same key sequence already exists.
  bool create(const IndexDef& index);
  void drop_all() { indexes_.clear(); }

  bool contains(const IndexDef& index) const;
  /// True if some index starts with `field`; sets *dir to that key's direction.
  bool has_first_key(std::string_view field, SortDirection* dir = nullptr) const;

  const std::vector<IndexDef>& indexes() const { return indexes_; }
  std::size_t size() const { return indexes_.size(); }
  bool empty() const { return indexes_.empty(); }
  std::size_t total_keys() const;

  bool operator==(const IndexSet&) const = default;

 private:
  std::vector<IndexDef> indexes_;
};

IndexSet create_index(IndexSet indexes, const IndexDef& index);
IndexSet drop_all(IndexSet indexes);

}  // namespace ixa
