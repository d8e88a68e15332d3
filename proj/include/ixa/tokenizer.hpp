#pragma once

#include <cstddef>
#include <vector>

#include "ixa/index.hpp"
#include "ixa/query.hpp"
#include "ixa/vocabulary.hpp"

namespace ixa {

inline constexpr std::size_t kDefaultStateLength = 32;

/// Fixed-length, zero-padded token sequence: the agent's state.
struct StateTokens {
  std::vector<TokenId> ids;

  std::size_t size() const { return ids.size(); }
  bool operator==(const StateTokens&) const = default;
};

struct TokenizeDiagnostics {
  bool truncated = false;
  std::size_t unknown_tokens = 0;
};

/// Pre-order walk keeping operators and fields and dropping literals. A field
/// that is the first key of an existing index is followed by IDX_ASC/IDX_DESC.
/// The aggregation follows: `count`, `limit`, or `sort` with each sort field
/// and its direction marker. Ends with EOS, padded with PAD to `length`.
StateTokens tokenize(const Query& query, const IndexSet& indexes, const Vocabulary& vocab,
                     std::size_t length = kDefaultStateLength,
                     TokenizeDiagnostics* diagnostics = nullptr);

/// Token strings up to and including EOS, for logs and tests.
std::vector<std::string> render_tokens(const StateTokens& state, const Vocabulary& vocab);

}  // namespace ixa
