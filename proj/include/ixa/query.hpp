#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ixa/schema.hpp"

namespace ixa {

enum class SortDirection { Asc, Desc };

inline SortDirection inverted(SortDirection d) {
  return d == SortDirection::Asc ? SortDirection::Desc : SortDirection::Asc;
}
std::string_view to_string(SortDirection d);
SortDirection sort_direction_from_string(std::string_view s);

enum class CmpOp { Eq, Gt, Gte, Lt, Lte, Nin };
enum class LogicOp { And, Or, Nor, Not };

std::string_view to_token(CmpOp op);
std::string_view to_token(LogicOp op);

struct DateValue {
  std::int64_t millis = 0;
  bool operator==(const DateValue&) const = default;
};

using StringList = std::vector<std::string>;
using IntList = std::vector<std::int64_t>;
using Literal = std::variant<std::string, std::int64_t, DateValue, StringList, IntList>;

struct Predicate {
  CmpOp op = CmpOp::Eq;
  std::string field;
  Literal value;

  bool operator==(const Predicate&) const = default;
};

struct Expr;

struct Logical {
  LogicOp op = LogicOp::And;
  std::vector<Expr> children;

  bool operator==(const Logical&) const;
};

struct Expr {
  std::variant<Predicate, Logical> node;

  bool is_predicate() const { return std::holds_alternative<Predicate>(node); }
  const Predicate& predicate() const { return std::get<Predicate>(node); }
  const Logical& logical() const { return std::get<Logical>(node); }

  bool operator==(const Expr& other) const { return node == other.node; }
};

inline bool Logical::operator==(const Logical& other) const {
  return op == other.op && children == other.children;
}

Expr make_predicate(CmpOp op, std::string field, Literal value);
Expr make_logical(LogicOp op, std::vector<Expr> children);

struct SortKey {
  std::string field;
  SortDirection direction = SortDirection::Asc;

  bool operator==(const SortKey&) const = default;
};

enum class AggKind { Count, Limit, SortThenLimit };

struct Aggregation {
  AggKind kind = AggKind::Count;
  std::int64_t limit = 0;        // Limit and SortThenLimit only.
  std::vector<SortKey> sort;     // SortThenLimit only.

  static Aggregation count() { return {AggKind::Count, 0, {}}; }
  static Aggregation limit_of(std::int64_t n) { return {AggKind::Limit, n, {}}; }
  static Aggregation sort_then_limit(std::vector<SortKey> keys, std::int64_t n) {
    return {AggKind::SortThenLimit, n, std::move(keys)};
  }

  bool operator==(const Aggregation&) const = default;
};

struct Query {
  Expr expr;
  Aggregation agg;

  bool operator==(const Query&) const = default;
};

/// Predicate fields in first-occurrence pre-order, then sort-only fields.
std::vector<std::string> extract_attributes(const Query& query);

/// Number of distinct attributes the query touches.
inline std::size_t attribute_count(const Query& query) {
  return extract_attributes(query).size();
}

/// Comparison operators permitted on an attribute type.
std::vector<CmpOp> valid_operators(AttrType type);

/// Throws QueryError naming the first violated constraint.
void validate(const Query& query, const Schema& schema);

/// Visits every predicate leaf in pre-order.
template <typename Fn>
void for_each_predicate(const Expr& expr, Fn&& fn) {
  if (expr.is_predicate()) {
    fn(expr.predicate());
    return;
  }
  for (const Expr& child : expr.logical().children) for_each_predicate(child, fn);
}

}  // namespace ixa
