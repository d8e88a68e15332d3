#include "ixa/vocabulary.hpp"

#include "ixa/error.hpp"

namespace ixa {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < kReservedCount) throw SchemaError("vocabulary lacks reserved tokens");
  for (std::size_t i = 0; i < kReservedCount; ++i) {
    if (tokens_[i] != kReserved[i]) {
      throw SchemaError("vocabulary reserved token " + std::to_string(i) + " is '" + tokens_[i] +
                        "', expected '" + std::string(kReserved[i]) + "'");
    }
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!ids_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw SchemaError("duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return ids_.find(std::string(token)) != ids_.end();
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw SchemaError("token id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

Vocabulary build_vocabulary(const Schema& schema) {
  if (schema.empty()) throw SchemaError("cannot build a vocabulary from an empty schema");
  std::vector<std::string> tokens;
  tokens.reserve(Vocabulary::kReservedCount + Vocabulary::kOperators.size() + schema.size());
  for (auto t : Vocabulary::kReserved) tokens.emplace_back(t);
  for (auto t : Vocabulary::kOperators) tokens.emplace_back(t);
  for (const Attribute& attr : schema.attributes()) {
    for (const std::string& existing : tokens) {
      if (existing == attr.name) throw SchemaError("field name '" + attr.name + "' collides with a token");
    }
    tokens.push_back(attr.name);
  }
  return Vocabulary(std::move(tokens));
}

}  // namespace ixa
