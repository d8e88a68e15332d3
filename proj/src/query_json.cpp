#include "ixa/query_json.hpp"

#include <fstream>

#include "ixa/error.hpp"

namespace ixa {

namespace {

json literal_to_json(const Literal& value) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DateValue>) {
          return json{{"$date", v.millis}};
        } else {
          return json(v);
        }
      },
      value);
}

Literal literal_from_json(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_object() && j.size() == 1 && j.contains("$date") && j["$date"].is_number_integer()) {
    return DateValue{j["$date"].get<std::int64_t>()};
  }
  if (j.is_array() && !j.empty()) {
    if (std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_string(); })) {
      return j.get<StringList>();
    }
    if (std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_number_integer(); })) {
      return j.get<IntList>();
    }
  }
  throw QueryError("unsupported literal " + j.dump());
}

std::optional<CmpOp> cmp_from_token(std::string_view t) {
  for (CmpOp op : {CmpOp::Eq, CmpOp::Gt, CmpOp::Gte, CmpOp::Lt, CmpOp::Lte, CmpOp::Nin}) {
    if (to_token(op) == t) return op;
  }
  return std::nullopt;
}

std::optional<LogicOp> logic_from_token(std::string_view t) {
  for (LogicOp op : {LogicOp::And, LogicOp::Or, LogicOp::Nor, LogicOp::Not}) {
    if (to_token(op) == t) return op;
  }
  return std::nullopt;
}

// {"f2": {"$eq": v}} or {"f2": v} (implicit $eq).
Expr field_first_from_json(const std::string& field, const json& body) {
  if (body.is_object() && body.size() == 1 && !body.contains("$date")) {
    auto it = body.begin();
    if (auto op = cmp_from_token(it.key())) {
      return make_predicate(*op, field, literal_from_json(it.value()));
    }
    throw QueryError("unknown comparison operator '" + it.key() + "'");
  }
  return make_predicate(CmpOp::Eq, field, literal_from_json(body));
}

}  // namespace

json to_json(const Expr& expr) {
  if (expr.is_predicate()) {
    const Predicate& p = expr.predicate();
    return json{{std::string(to_token(p.op)), json{{p.field, literal_to_json(p.value)}}}};
  }
  const Logical& l = expr.logical();
  if (l.op == LogicOp::Not && l.children.size() == 1) {
    return json{{"$not", to_json(l.children.front())}};
  }
  json children = json::array();
  for (const Expr& child : l.children) children.push_back(to_json(child));
  return json{{std::string(to_token(l.op)), children}};
}

json to_json(const Aggregation& agg) {
  switch (agg.kind) {
    case AggKind::Count: return json{{"type", "count"}};
    case AggKind::Limit: return json{{"type", "limit"}, {"limit", agg.limit}};
    case AggKind::SortThenLimit: {
      json keys = json::array();
      for (const SortKey& k : agg.sort) keys.push_back(json::array({k.field, to_string(k.direction)}));
      return json{{"type", "sort"}, {"limit", agg.limit}, {"sort", keys}};
    }
  }
  return json{};
}

json to_json(const Query& query) {
  return json{{"expr", to_json(query.expr)}, {"agg", to_json(query.agg)}};
}

json to_json(const IndexDef& index) {
  json keys = json::array();
  for (const IndexKey& k : index.keys) keys.push_back(json::array({k.field, to_string(k.direction)}));
  return keys;
}

json to_json(const MaybeIndex& index) { return index ? to_json(*index) : json(nullptr); }

json to_json(const IndexSet& indexes) {
  json out = json::array();
  for (const IndexDef& index : indexes.indexes()) out.push_back(to_json(index));
  return out;
}

Expr expr_from_json(const json& j) {
  if (!j.is_object() || j.empty()) throw QueryError("expression must be a nonempty object");
  if (j.size() > 1) {
    // Implicit conjunction: {"f1": ..., "f2": ...}.
    std::vector<Expr> children;
    for (auto it = j.begin(); it != j.end(); ++it) {
      children.push_back(expr_from_json(json{{it.key(), it.value()}}));
    }
    return make_logical(LogicOp::And, std::move(children));
  }
  auto it = j.begin();
  const std::string& key = it.key();
  const json& body = it.value();
  if (auto op = logic_from_token(key)) {
    if (*op == LogicOp::Not) {
      if (body.is_array()) {
        if (body.size() != 1) throw QueryError("$not takes exactly one expression");
        return make_logical(LogicOp::Not, {expr_from_json(body.front())});
      }
      return make_logical(LogicOp::Not, {expr_from_json(body)});
    }
    if (!body.is_array()) throw QueryError(key + " expects an array");
    std::vector<Expr> children;
    for (const json& c : body) children.push_back(expr_from_json(c));
    return make_logical(*op, std::move(children));
  }
  if (auto op = cmp_from_token(key)) {
    if (!body.is_object() || body.size() != 1) {
      throw QueryError(key + " expects a single {field: value} object");
    }
    auto f = body.begin();
    return make_predicate(*op, f.key(), literal_from_json(f.value()));
  }
  if (!key.empty() && key.front() == '$') throw QueryError("unknown operator '" + key + "'");
  return field_first_from_json(key, body);
}

Aggregation aggregation_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type")) throw QueryError("aggregation needs a type");
  const std::string type = j["type"].get<std::string>();
  auto limit_of = [&j]() -> std::int64_t {
    if (!j.contains("limit") || !j["limit"].is_number_integer()) {
      throw QueryError("aggregation requires an integer limit");
    }
    return j["limit"].get<std::int64_t>();
  };
  if (type == "count") return Aggregation::count();
  if (type == "limit") return Aggregation::limit_of(limit_of());
  if (type == "sort") {
    if (!j.contains("sort") || !j["sort"].is_array()) throw QueryError("sort aggregation needs keys");
    std::vector<SortKey> keys;
    for (const json& k : j["sort"]) {
      if (!k.is_array() || k.size() != 2) throw QueryError("sort key must be [field, dir]");
      keys.push_back({k[0].get<std::string>(), sort_direction_from_string(k[1].get<std::string>())});
    }
    return Aggregation::sort_then_limit(std::move(keys), limit_of());
  }
  throw QueryError("unknown aggregation type '" + type + "'");
}

Query query_from_json(const json& j) {
  if (!j.is_object() || !j.contains("expr")) throw QueryError("query must have an expr");
  try {
    Query q{expr_from_json(j["expr"]),
            j.contains("agg") ? aggregation_from_json(j["agg"]) : Aggregation::count()};
    return q;
  } catch (const json::exception& e) {
    throw QueryError(std::string("malformed query: ") + e.what());
  }
}

IndexDef index_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw QueryError("index must be a nonempty array of keys");
  IndexDef index;
  for (const json& k : j) {
    if (!k.is_array() || k.size() != 2 || !k[0].is_string() || !k[1].is_string()) {
      throw QueryError("index key must be [field, dir]");
    }
    index.keys.push_back({k[0].get<std::string>(), sort_direction_from_string(k[1].get<std::string>())});
  }
  return index;
}

MaybeIndex maybe_index_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return index_from_json(j);
}

std::string to_jsonl_line(const Query& query) { return to_json(query).dump(); }

Query parse_query_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw QueryError("invalid JSON");
  return query_from_json(j);
}

void write_queries(const std::filesystem::path& path, const std::vector<Query>& queries) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const Query& q : queries) out << to_jsonl_line(q) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<Query> read_queries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Query> queries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      queries.push_back(parse_query_line(line));
    } catch (const Error& e) {
      throw QueryError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return queries;
}

}  // namespace ixa
