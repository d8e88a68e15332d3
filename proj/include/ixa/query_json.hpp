#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ixa/index.hpp"
#include "ixa/query.hpp"

namespace ixa {

using nlohmann::json;

// Leaves serialize operator-first: {"$eq": {"f2": "w17"}}. Dates use
// {"$date": millis}. The parser also accepts field-first leaves
// ({"f2": {"$eq": ...}}) and implicit conjunctions of several fields.
json to_json(const Expr& expr);
json to_json(const Aggregation& agg);
json to_json(const Query& query);
json to_json(const IndexDef& index);
json to_json(const MaybeIndex& index);
json to_json(const IndexSet& indexes);

/// Throws QueryError on malformed input. No schema validation.
Expr expr_from_json(const json& j);
Aggregation aggregation_from_json(const json& j);
Query query_from_json(const json& j);
IndexDef index_from_json(const json& j);
MaybeIndex maybe_index_from_json(const json& j);

std::string to_jsonl_line(const Query& query);
Query parse_query_line(const std::string& line);

/// One query per line; throws IoError when the file cannot be written.
void write_queries(const std::filesystem::path& path, const std::vector<Query>& queries);
/// Throws IoError/QueryError naming the offending line.
std::vector<Query> read_queries(const std::filesystem::path& path);

}  // namespace ixa
