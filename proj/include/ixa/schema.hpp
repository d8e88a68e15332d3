#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ixa {

enum class AttrType { String, Int, Date, StringArray };

std::string_view to_string(AttrType type);
AttrType attr_type_from_string(std::string_view name);

struct Attribute {
  std::string name;
  AttrType type = AttrType::String;
  // Number of distinct values; drives equality selectivity.
  std::int64_t cardinality = 1;
  // Value domain for Int (inclusive) and Date (epoch millis, inclusive).
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  bool operator==(const Attribute&) const = default;
};

/// Ordered attribute list of a document collection.
class Schema {
 public:
  Schema() = default;
  /// Throws SchemaError on duplicate names or cardinality < 1.
  explicit Schema(std::vector<Attribute> attributes);

  const std::vector<Attribute>& attributes() const { return attributes_; }
  std::size_t size() const { return attributes_.size(); }
  bool empty() const { return attributes_.empty(); }

  const Attribute* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  bool operator==(const Schema&) const = default;

 private:
  std::vector<Attribute> attributes_;
};

}  // namespace ixa
