#include "ixa/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ixa/error.hpp"
#include "ixa/query_json.hpp"

namespace ixa {

namespace {

constexpr std::int64_t kDateEpoch = 1262304000000;  // 2010-01-01T00:00:00Z
constexpr std::int64_t kDateStep = 3600 * 1000;     // one hour
constexpr std::int64_t kDateCardinality = 100000;

Attribute string_attr(std::string name, std::int64_t cardinality) {
  return {std::move(name), AttrType::String, cardinality, 0, cardinality - 1};
}

Attribute int_attr(std::string name, std::int64_t lo, std::int64_t hi) {
  return {std::move(name), AttrType::Int, hi - lo + 1, lo, hi};
}

Attribute date_attr(std::string name) {
  return {std::move(name), AttrType::Date, kDateCardinality, kDateEpoch,
          kDateEpoch + (kDateCardinality - 1) * kDateStep};
}

std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

Literal scalar_value(const Attribute& attr, Rng& rng) {
  switch (attr.type) {
    case AttrType::String:
    case AttrType::StringArray:
      return string_value(attr, uniform(rng, 0, attr.cardinality - 1));
    case AttrType::Int: return uniform(rng, attr.lo, attr.hi);
    case AttrType::Date:
      return DateValue{attr.lo + uniform(rng, 0, attr.cardinality - 1) * kDateStep};
  }
  return std::int64_t{0};
}

Literal list_value(const Attribute& attr, Rng& rng) {
  const auto n = static_cast<std::size_t>(uniform(rng, 1, 3));
  if (attr.type == AttrType::Int) {
    IntList values;
    for (std::size_t i = 0; i < n; ++i) values.push_back(uniform(rng, attr.lo, attr.hi));
    return values;
  }
  StringList values;
  for (std::size_t i = 0; i < n; ++i) {
    values.push_back(string_value(attr, uniform(rng, 0, attr.cardinality - 1)));
  }
  return values;
}

}  // namespace

Schema default_schema() {
  // String cardinalities are log-spaced over 10^2..10^4. The layout places
  // strings first and dates at f10/f11.
  std::vector<Attribute> attrs;
  for (int i = 0; i < 6; ++i) {
    const double exponent = 2.0 + 2.0 * i / 5.0;
    attrs.push_back(string_attr("f" + std::to_string(i),
                                static_cast<std::int64_t>(std::llround(std::pow(10.0, exponent)))));
  }
  attrs.push_back(int_attr("f6", 0, 9));
  attrs.push_back(int_attr("f7", 0, 99));
  attrs.push_back(int_attr("f8", 0, 999));
  attrs.push_back(int_attr("f9", 1900, 2019));
  attrs.push_back(date_attr("f10"));
  attrs.push_back(date_attr("f11"));
  attrs.push_back(int_attr("f12", 0, 9999));
  attrs.push_back(int_attr("f13", 0, 99999));
  attrs.push_back({"f14", AttrType::StringArray, 1000, 0, 999});
  return Schema(std::move(attrs));
}

void QueryGenConfig::validate() const {
  if (min_attrs < 1 || max_attrs < min_attrs) throw ConfigError("attrs_per_query range is empty");
  if (p_limit < 0 || p_sort < 0 || p_count < 0) throw ConfigError("negative aggregation probability");
  if (std::abs(p_limit + p_sort + p_count - 1.0) > 1e-9) {
    throw ConfigError("aggregation probabilities must sum to 1");
  }
  if (sort_field_prob <= 0 || sort_field_prob > 1) throw ConfigError("sort_field_prob must be in (0,1]");
  if (limit_values.empty()) throw ConfigError("limit_values is empty");
  for (auto v : limit_values) {
    if (v < 1) throw ConfigError("limit values must be positive");
  }
}

std::string string_value(const Attribute& attr, std::int64_t k) {
  return attr.name + "_v" + std::to_string(k);
}

Query gen_query(const Schema& schema, const QueryGenConfig& cfg, Rng& rng) {
  const auto max_attrs = std::min<std::int64_t>(cfg.max_attrs, static_cast<std::int64_t>(schema.size()));
  const auto n = static_cast<std::size_t>(uniform(rng, cfg.min_attrs, max_attrs));

  std::vector<std::size_t> order(schema.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first n entries are a uniform n-subset in random order.
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(uniform(rng, static_cast<std::int64_t>(i),
                                                    static_cast<std::int64_t>(order.size() - 1)));
    std::swap(order[i], order[j]);
  }

  std::vector<Expr> leaves;
  std::vector<std::string> fields;
  for (std::size_t i = 0; i < n; ++i) {
    const Attribute& attr = schema.attributes()[order[i]];
    const auto ops = valid_operators(attr.type);
    const CmpOp op = ops[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(ops.size()) - 1))];
    leaves.push_back(make_predicate(op, attr.name,
                                    op == CmpOp::Nin ? list_value(attr, rng) : scalar_value(attr, rng)));
    fields.push_back(attr.name);
  }

  Expr expr;
  if (n == 1) {
    expr = std::move(leaves.front());
  } else {
    static constexpr LogicOp kJoins[] = {LogicOp::And, LogicOp::Or, LogicOp::Nor};
    expr = make_logical(kJoins[uniform(rng, 0, 2)], std::move(leaves));
  }

  const std::int64_t limit =
      cfg.limit_values[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(cfg.limit_values.size()) - 1))];
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  Aggregation agg;
  if (u < cfg.p_limit) {
    agg = Aggregation::limit_of(limit);
  } else if (u < cfg.p_limit + cfg.p_sort) {
    std::vector<SortKey> keys;
    std::bernoulli_distribution include(cfg.sort_field_prob);
    std::bernoulli_distribution descending(0.5);
    while (keys.empty()) {
      for (const std::string& f : fields) {
        if (include(rng)) {
          keys.push_back({f, descending(rng) ? SortDirection::Desc : SortDirection::Asc});
        }
      }
    }
    agg = Aggregation::sort_then_limit(std::move(keys), limit);
  } else {
    agg = Aggregation::count();
  }
  return Query{std::move(expr), std::move(agg)};
}

std::vector<Query> gen_workload(const Schema& schema, const QueryGenConfig& cfg, std::size_t count) {
  cfg.validate();
  if (count < 1) throw ConfigError("workload count must be >= 1");
  Rng rng(cfg.seed);
  std::vector<Query> queries;
  queries.reserve(count);
  for (std::size_t i = 0; i < count; ++i) queries.push_back(gen_query(schema, cfg, rng));
  return queries;
}

std::vector<Query> gen_workload(const Schema& schema, const QueryGenConfig& cfg, std::size_t count,
                                const std::filesystem::path& out) {
  auto queries = gen_workload(schema, cfg, count);
  write_queries(out, queries);
  return queries;
}

}  // namespace ixa
