#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ixa/schema.hpp"

namespace ixa {

using TokenId = std::int32_t;

/// Frozen token table: reserved ids, operator tokens, then one token per
/// schema field in schema order.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kEos = 1;
  static constexpr TokenId kUnk = 2;
  static constexpr TokenId kIdxAsc = 3;
  static constexpr TokenId kIdxDesc = 4;
  static constexpr std::size_t kReservedCount = 5;

  static constexpr std::array<std::string_view, kReservedCount> kReserved = {
      "PAD", "EOS", "UNK", "IDX_ASC", "IDX_DESC"};
  static constexpr std::array<std::string_view, 13> kOperators = {
      "$eq", "$gt", "$gte", "$lt", "$lte", "$nin", "$and",
      "$or", "$nor", "$not", "count", "limit", "sort"};

  Vocabulary() = default;
  /// Rebuilds from an explicit token list (model files); validates reserved prefix.
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  /// kUnk when the token is not in the table.
  TokenId id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

/// Throws SchemaError for an empty schema or duplicate field names.
Vocabulary build_vocabulary(const Schema& schema);

}  // namespace ixa
