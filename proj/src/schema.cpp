#include "ixa/schema.hpp"

#include <unordered_set>

#include "ixa/error.hpp"

namespace ixa {

std::string_view to_string(AttrType type) {
  switch (type) {
    case AttrType::String: return "string";
    case AttrType::Int: return "int";
    case AttrType::Date: return "date";
    case AttrType::StringArray: return "string_array";
  }
  return "?";
}

AttrType attr_type_from_string(std::string_view name) {
  if (name == "string") return AttrType::String;
  if (name == "int") return AttrType::Int;
  if (name == "date") return AttrType::Date;
  if (name == "string_array") return AttrType::StringArray;
  throw SchemaError("unknown attribute type '" + std::string(name) + "'");
}

Schema::Schema(std::vector<Attribute> attributes) : attributes_(std::move(attributes)) {
  std::unordered_set<std::string> seen;
  for (const Attribute& attr : attributes_) {
    if (attr.name.empty()) throw SchemaError("attribute with empty name");
    if (!seen.insert(attr.name).second) throw SchemaError("duplicate attribute '" + attr.name + "'");
    if (attr.cardinality < 1) throw SchemaError("attribute '" + attr.name + "' has cardinality < 1");
  }
}

const Attribute* Schema::find(std::string_view name) const {
  for (const Attribute& attr : attributes_) {
    if (attr.name == name) return &attr;
  }
  return nullptr;
}

}  // namespace ixa
