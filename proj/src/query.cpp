#include "ixa/query.hpp"

#include <algorithm>
#include <unordered_set>

#include "ixa/error.hpp"

namespace ixa {

std::string_view to_string(SortDirection d) { return d == SortDirection::Asc ? "asc" : "desc"; }

SortDirection sort_direction_from_string(std::string_view s) {
  if (s == "asc" || s == "ASC" || s == "1") return SortDirection::Asc;
  if (s == "desc" || s == "DESC" || s == "-1") return SortDirection::Desc;
  throw QueryError("unknown sort direction '" + std::string(s) + "'");
}

std::string_view to_token(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "$eq";
    case CmpOp::Gt: return "$gt";
    case CmpOp::Gte: return "$gte";
    case CmpOp::Lt: return "$lt";
    case CmpOp::Lte: return "$lte";
    case CmpOp::Nin: return "$nin";
  }
  return "?";
}

std::string_view to_token(LogicOp op) {
  switch (op) {
    case LogicOp::And: return "$and";
    case LogicOp::Or: return "$or";
    case LogicOp::Nor: return "$nor";
    case LogicOp::Not: return "$not";
  }
  return "?";
}

Expr make_predicate(CmpOp op, std::string field, Literal value) {
  return Expr{Predicate{op, std::move(field), std::move(value)}};
}

Expr make_logical(LogicOp op, std::vector<Expr> children) {
  return Expr{Logical{op, std::move(children)}};
}

std::vector<std::string> extract_attributes(const Query& query) {
  std::vector<std::string> attrs;
  auto add = [&attrs](const std::string& field) {
    if (std::find(attrs.begin(), attrs.end(), field) == attrs.end()) attrs.push_back(field);
  };
  for_each_predicate(query.expr, [&](const Predicate& p) { add(p.field); });
  for (const SortKey& key : query.agg.sort) add(key.field);
  return attrs;
}

std::vector<CmpOp> valid_operators(AttrType type) {
  switch (type) {
    case AttrType::String:
    case AttrType::Int:
      return {CmpOp::Eq, CmpOp::Gt, CmpOp::Gte, CmpOp::Lt, CmpOp::Lte, CmpOp::Nin};
    case AttrType::Date:
    case AttrType::StringArray:
      return {CmpOp::Eq, CmpOp::Gt, CmpOp::Gte, CmpOp::Lt, CmpOp::Lte};
  }
  return {};
}

namespace {

bool literal_matches(AttrType type, CmpOp op, const Literal& value) {
  if (op == CmpOp::Nin) {
    if (type == AttrType::String) {
      return std::holds_alternative<StringList>(value) && !std::get<StringList>(value).empty();
    }
    if (type == AttrType::Int) {
      return std::holds_alternative<IntList>(value) && !std::get<IntList>(value).empty();
    }
    return false;
  }
  switch (type) {
    case AttrType::String:
    case AttrType::StringArray: return std::holds_alternative<std::string>(value);
    case AttrType::Int: return std::holds_alternative<std::int64_t>(value);
    case AttrType::Date: return std::holds_alternative<DateValue>(value);
  }
  return false;
}

void validate_expr(const Expr& expr, const Schema& schema) {
  if (expr.is_predicate()) {
    const Predicate& p = expr.predicate();
    const Attribute* attr = schema.find(p.field);
    if (attr == nullptr) throw QueryError("unknown field '" + p.field + "'");
    auto ops = valid_operators(attr->type);
    if (std::find(ops.begin(), ops.end(), p.op) == ops.end()) {
      throw QueryError(std::string(to_token(p.op)) + " not valid on " +
                       std::string(to_string(attr->type)) + " field '" + p.field + "'");
    }
    if (!literal_matches(attr->type, p.op, p.value)) {
      throw QueryError("literal type mismatch on field '" + p.field + "'");
    }
    return;
  }
  const Logical& l = expr.logical();
  if (l.op == LogicOp::Not) {
    if (l.children.size() != 1) throw QueryError("$not requires exactly one child");
  } else if (l.children.size() < 2) {
    throw QueryError(std::string(to_token(l.op)) + " requires at least two children");
  }
  for (const Expr& child : l.children) validate_expr(child, schema);
}

}  // namespace

void validate(const Query& query, const Schema& schema) {
  validate_expr(query.expr, schema);
  const Aggregation& agg = query.agg;
  if (agg.kind != AggKind::Count && agg.limit < 1) throw QueryError("limit must be positive");
  if (agg.kind != AggKind::SortThenLimit && !agg.sort.empty()) {
    throw QueryError("sort keys on a non-sort aggregation");
  }
  if (agg.kind == AggKind::SortThenLimit) {
    if (agg.sort.empty()) throw QueryError("sort aggregation without keys");
    std::unordered_set<std::string> seen;
    for (const SortKey& key : agg.sort) {
      if (!schema.contains(key.field)) throw QueryError("unknown sort field '" + key.field + "'");
      if (!seen.insert(key.field).second) throw QueryError("duplicate sort field '" + key.field + "'");
    }
  }
}

}  // namespace ixa
