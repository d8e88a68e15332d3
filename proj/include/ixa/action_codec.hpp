#pragma once

#include <string>
#include <vector>

#include "ixa/index.hpp"

namespace ixa {

/// One integer per index-key head; each in [0, 2*k]. 0 is a no-op, odd values
/// pick an attribute ascending, even values descending.
struct ActionVec {
  std::vector<int> heads;

  bool operator==(const ActionVec&) const = default;
};

inline int options_per_head(std::size_t k_max) { return static_cast<int>(2 * k_max + 1); }

/// Positional decode against the query's extracted attributes. Out-of-range
/// positions and repeated fields are skipped; nullopt if every head skips.
MaybeIndex decode_action(const ActionVec& action, const std::vector<std::string>& attrs);

/// Inverse of decode_action. Throws EncodingError if a key field is not in
/// `attrs` or the index has more than `k` keys.
ActionVec encode_action(const MaybeIndex& index, const std::vector<std::string>& attrs,
                        std::size_t k);

}  // namespace ixa
