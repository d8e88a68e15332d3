#include "ixa/index.hpp"

#include <algorithm>
#include <numeric>

#include "ixa/error.hpp"

namespace ixa {

void validate(const IndexDef& index, std::size_t max_keys) {
  if (index.keys.empty() || index.keys.size() > max_keys) {
    throw QueryError("index must have 1.." + std::to_string(max_keys) + " keys, got " +
                     std::to_string(index.keys.size()));
  }
  for (std::size_t i = 0; i < index.keys.size(); ++i) {
    for (std::size_t j = i + 1; j < index.keys.size(); ++j) {
      if (index.keys[i].field == index.keys[j].field) {
        throw QueryError("index repeats field '" + index.keys[i].field + "'");
      }
    }
  }
}

std::string to_string(const IndexDef& index) {
  std::string out = "[";
  for (std::size_t i = 0; i < index.keys.size(); ++i) {
    if (i) out += ", ";
    out += "(" + index.keys[i].field + "," + std::string(to_string(index.keys[i].direction)) + ")";
  }
  return out + "]";
}

bool IndexSet::create(const IndexDef& index) {
  if (contains(index)) return false;
  indexes_.push_back(index);
  return true;
}

bool IndexSet::contains(const IndexDef& index) const {
  return std::find(indexes_.begin(), indexes_.end(), index) != indexes_.end();
}

bool IndexSet::has_first_key(std::string_view field, SortDirection* dir) const {
  for (const IndexDef& index : indexes_) {
    if (!index.keys.empty() && index.keys.front().field == field) {
      if (dir != nullptr) *dir = index.keys.front().direction;
      return true;
    }
  }
  return false;
}

std::size_t IndexSet::total_keys() const {
  return std::accumulate(indexes_.begin(), indexes_.end(), std::size_t{0},
                         [](std::size_t acc, const IndexDef& i) { return acc + i.keys.size(); });
}

IndexSet create_index(IndexSet indexes, const IndexDef& index) {
  indexes.create(index);
  return indexes;
}

IndexSet drop_all(IndexSet indexes) {
  indexes.drop_all();
  return indexes;
}

}  // namespace ixa
