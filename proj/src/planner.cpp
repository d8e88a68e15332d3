#include "ixa/planner.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "ixa/error.hpp"

namespace ixa {

void CollectionModel::validate() const {
  if (doc_count < 1) throw ConfigError("doc_count must be >= 1");
  if (!(unit_scan_cost > 0) || !(unit_fetch_cost > 0) || !(time_per_unit > 0)) {
    throw ConfigError("unit costs must be positive");
  }
  if (!(noise_sigma >= 0)) throw ConfigError("noise_sigma must be >= 0");
  if (!(range_selectivity > 0 && range_selectivity <= 1)) {
    throw ConfigError("range_selectivity must be in (0,1]");
  }
  if (bytes_per_entry_base < 0 || bytes_per_key <= 0) throw ConfigError("index size constants invalid");
}

void RewardConfig::validate() const {
  if (!(omega_size >= 0) || !(omega_time >= 0)) throw ConfigError("reward weights must be >= 0");
  if (omega_size == 0 && omega_time == 0) throw ConfigError("reward weights cannot both be 0");
}

namespace {

double clamp_fraction(double s, const CollectionModel& coll) {
  return std::clamp(s, 1.0 / static_cast<double>(coll.doc_count), 1.0);
}

double leaf_selectivity(const Predicate& p, const CollectionModel& coll) {
  const Attribute* attr = coll.schema.find(p.field);
  const double c = attr ? static_cast<double>(attr->cardinality) : 1.0;
  switch (p.op) {
    case CmpOp::Eq: return 1.0 / c;
    case CmpOp::Gt:
    case CmpOp::Gte:
    case CmpOp::Lt:
    case CmpOp::Lte: return coll.range_selectivity;
    case CmpOp::Nin: return (c - 1.0) / c;
  }
  return 1.0;
}

double sort_penalty(double rows, const CollectionModel& coll) {
  return rows * std::log2(std::max(2.0, rows)) * coll.unit_scan_cost;
}

// Predicates an index can seek on: the expression itself when it is a leaf,
// or the leaf children of a top-level $and.
struct ConjunctiveContext {
  std::vector<const Predicate*> predicates;
  bool has_nested = false;  // non-leaf children under the top-level $and
};

ConjunctiveContext conjunctive_context(const Expr& expr) {
  ConjunctiveContext ctx;
  if (expr.is_predicate()) {
    ctx.predicates.push_back(&expr.predicate());
    return ctx;
  }
  const Logical& l = expr.logical();
  if (l.op != LogicOp::And) return ctx;
  for (const Expr& child : l.children) {
    if (child.is_predicate()) {
      ctx.predicates.push_back(&child.predicate());
    } else {
      ctx.has_nested = true;
    }
  }
  return ctx;
}

struct Candidate {
  double cost = 0.0;
  MaybeIndex index;
  std::size_t prefix = 0;
  bool sort_served = false;
};

// Lower cost wins; ties go to fewer keys, then the lexicographically smaller
// key sequence. The full scan counts as zero keys.
bool better(const Candidate& a, const Candidate& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  const std::size_t ka = a.index ? a.index->keys.size() : 0;
  const std::size_t kb = b.index ? b.index->keys.size() : 0;
  if (ka != kb) return ka < kb;
  if (!a.index || !b.index) return false;
  return a.index->keys < b.index->keys;
}

bool sort_served_by(const IndexDef& index, std::size_t eq_prefix, const std::vector<SortKey>& sort) {
  if (sort.empty() || eq_prefix + sort.size() > index.keys.size()) return false;
  bool all_same = true;
  bool all_inverted = true;
  for (std::size_t i = 0; i < sort.size(); ++i) {
    const IndexKey& key = index.keys[eq_prefix + i];
    if (key.field != sort[i].field) return false;
    if (key.direction == sort[i].direction) {
      all_inverted = false;
    } else {
      all_same = false;
    }
  }
  return all_same || all_inverted;
}

std::optional<Candidate> index_candidate(const IndexDef& index, const ConjunctiveContext& ctx,
                                         const std::vector<SortKey>& sort,
                                         const CollectionModel& coll) {
  auto has_pred = [&ctx](const std::string& field, bool eq_only) {
    return std::any_of(ctx.predicates.begin(), ctx.predicates.end(), [&](const Predicate* p) {
      return p->field == field && (!eq_only || p->op == CmpOp::Eq);
    });
  };
  std::size_t prefix = 0;
  while (prefix < index.keys.size() && has_pred(index.keys[prefix].field, false)) ++prefix;
  std::size_t eq_prefix = 0;
  while (eq_prefix < prefix && has_pred(index.keys[eq_prefix].field, true)) ++eq_prefix;

  const bool sorted = sort_served_by(index, eq_prefix, sort);
  if (prefix == 0 && !sorted) return std::nullopt;

  auto in_prefix = [&](const std::string& field) {
    for (std::size_t i = 0; i < prefix; ++i) {
      if (index.keys[i].field == field) return true;
    }
    return false;
  };
  double s = 1.0;
  bool residual = ctx.has_nested;
  for (const Predicate* p : ctx.predicates) {
    if (in_prefix(p->field)) {
      s *= leaf_selectivity(*p, coll);
    } else {
      residual = true;
    }
  }
  s = clamp_fraction(s, coll);

  const double n = static_cast<double>(coll.doc_count);
  const double rows = n * s;
  double cost = std::log2(n) + rows * coll.unit_fetch_cost;
  if (residual) cost += rows * coll.unit_scan_cost;
  if (!sort.empty() && !sorted) cost += sort_penalty(rows, coll);
  return Candidate{cost, index, prefix, sorted};
}

Candidate best_plan(const Expr& expr, const std::vector<SortKey>& sort, const IndexSet& indexes,
                    const CollectionModel& coll);

// A top-level $or can use one index per disjunct; it is only viable when
// every disjunct has one.
std::optional<Candidate> or_candidate(const Logical& disjunction, const std::vector<SortKey>& sort,
                                      double union_rows, const IndexSet& indexes,
                                      const CollectionModel& coll) {
  Candidate total;
  bool first = true;
  for (const Expr& child : disjunction.children) {
    Candidate part = best_plan(child, {}, indexes, coll);
    if (!part.index) return std::nullopt;
    total.cost += part.cost;
    if (first) {
      total.index = part.index;
      total.prefix = part.prefix;
      first = false;
    }
  }
  if (!sort.empty()) total.cost += sort_penalty(union_rows, coll);
  return total;
}

Candidate best_plan(const Expr& expr, const std::vector<SortKey>& sort, const IndexSet& indexes,
                    const CollectionModel& coll) {
  const double n = static_cast<double>(coll.doc_count);
  const double matched = n * selectivity(expr, coll);
  Candidate best{n * coll.unit_scan_cost + (sort.empty() ? 0.0 : sort_penalty(matched, coll)),
                 std::nullopt, 0, false};

  if (!expr.is_predicate() && expr.logical().op == LogicOp::Or) {
    if (auto c = or_candidate(expr.logical(), sort, matched, indexes, coll); c && better(*c, best)) {
      best = *c;
    }
    return best;
  }
  const ConjunctiveContext ctx = conjunctive_context(expr);
  for (const IndexDef& index : indexes.indexes()) {
    if (auto c = index_candidate(index, ctx, sort, coll); c && better(*c, best)) best = *c;
  }
  return best;
}

}  // namespace

double selectivity(const Expr& expr, const CollectionModel& coll) {
  if (expr.is_predicate()) return clamp_fraction(leaf_selectivity(expr.predicate(), coll), coll);
  const Logical& l = expr.logical();
  switch (l.op) {
    case LogicOp::And: {
      double s = 1.0;
      for (const Expr& c : l.children) s *= selectivity(c, coll);
      return clamp_fraction(s, coll);
    }
    case LogicOp::Or:
    case LogicOp::Nor: {
      double none = 1.0;
      for (const Expr& c : l.children) none *= 1.0 - selectivity(c, coll);
      return clamp_fraction(l.op == LogicOp::Or ? 1.0 - none : none, coll);
    }
    case LogicOp::Not:
      return clamp_fraction(1.0 - selectivity(l.children.front(), coll), coll);
  }
  return 1.0;
}

double full_scan_cost(const Query& query, const CollectionModel& coll) {
  const double n = static_cast<double>(coll.doc_count);
  double cost = n * coll.unit_scan_cost;
  if (!query.agg.sort.empty()) cost += sort_penalty(n * selectivity(query.expr, coll), coll);
  return cost;
}

PlanResult plan(const Query& query, const IndexSet& indexes, const CollectionModel& coll) {
  const Candidate best = best_plan(query.expr, query.agg.sort, indexes, coll);
  return PlanResult{best.index, best.prefix, best.sort_served, best.cost};
}

double execute(const Query& query, const IndexSet& indexes, const CollectionModel& coll,
               std::mt19937_64& rng) {
  const double base = plan(query, indexes, coll).est_cost * coll.time_per_unit;
  if (coll.noise_sigma <= 0.0) return base;
  return base * std::lognormal_distribution<double>(0.0, coll.noise_sigma)(rng);
}

double index_size(const IndexDef& index, const CollectionModel& coll) {
  return static_cast<double>(coll.doc_count) *
         (coll.bytes_per_entry_base + coll.bytes_per_key * static_cast<double>(index.keys.size()));
}

double index_size(const IndexSet& indexes, const CollectionModel& coll) {
  double total = 0.0;
  for (const IndexDef& index : indexes.indexes()) total += index_size(index, coll);
  return total;
}

double reward(double seconds, double bytes, const RewardConfig& cfg) {
  return -cfg.omega_size * bytes - cfg.omega_time * seconds;
}

}  // namespace ixa
