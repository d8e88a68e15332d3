#include "ixa/action_codec.hpp"

#include <algorithm>

#include "ixa/error.hpp"

namespace ixa {

MaybeIndex decode_action(const ActionVec& action, const std::vector<std::string>& attrs) {
  IndexDef index;
  for (int head : action.heads) {
    if (head <= 0) continue;
    const auto position = static_cast<std::size_t>((head + 1) / 2);  // 1-based
    if (position > attrs.size()) continue;
    const std::string& field = attrs[position - 1];
    const bool repeated = std::any_of(index.keys.begin(), index.keys.end(),
                                      [&](const IndexKey& k) { return k.field == field; });
    if (repeated) continue;
    index.keys.push_back({field, head % 2 == 1 ? SortDirection::Asc : SortDirection::Desc});
  }
  if (index.keys.empty()) return std::nullopt;
  return index;
}

ActionVec encode_action(const MaybeIndex& index, const std::vector<std::string>& attrs,
                        std::size_t k) {
  ActionVec action{std::vector<int>(k, 0)};
  if (!index) return action;
  if (index->keys.size() > k) {
    throw EncodingError("index " + to_string(*index) + " has more than " + std::to_string(k) +
                        " keys");
  }
  for (std::size_t j = 0; j < index->keys.size(); ++j) {
    const IndexKey& key = index->keys[j];
    auto it = std::find(attrs.begin(), attrs.end(), key.field);
    if (it == attrs.end()) {
      throw EncodingError("index field '" + key.field + "' is not a query attribute");
    }
    for (std::size_t i = 0; i < j; ++i) {
      if (index->keys[i].field == key.field) {
        throw EncodingError("index repeats field '" + key.field + "'");
      }
    }
    const int position = static_cast<int>(it - attrs.begin()) + 1;
    action.heads[j] = key.direction == SortDirection::Asc ? 2 * position - 1 : 2 * position;
  }
  return action;
}

}  // namespace ixa
