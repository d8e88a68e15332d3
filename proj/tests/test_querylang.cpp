#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "helpers.hpp"
#include "ixa/action_codec.hpp"
#include "ixa/error.hpp"
#include "ixa/query_json.hpp"
#include "ixa/tokenizer.hpp"
#include "ixa/vocabulary.hpp"
#include "ixa/workload.hpp"

using namespace ixa;
using testing::eq_count;
using testing::name_age_schema;

namespace {

const std::vector<std::string> kOperatorTokens = {"$eq",  "$gt",  "$gte", "$lt",   "$lte",
                                                  "$nin", "$and", "$or",  "$nor",  "$not",
                                                  "count", "limit", "sort"};

// Independent id table: reserved ids, the 13 operator tokens, then fields.
std::map<std::string, int> expected_ids(const Schema& schema) {
  std::map<std::string, int> ids{{"PAD", 0}, {"EOS", 1}, {"UNK", 2}, {"IDX_ASC", 3}, {"IDX_DESC", 4}};
  int next = 5;
  for (const auto& op : kOperatorTokens) ids[op] = next++;
  for (const auto& a : schema.attributes()) ids[a.name] = next++;
  return ids;
}

std::vector<TokenId> ids_of(const std::vector<std::string>& tokens, const Schema& schema,
                            std::size_t length) {
  const auto table = expected_ids(schema);
  std::vector<TokenId> out;
  for (const auto& t : tokens) out.push_back(table.at(t));
  out.resize(length, 0);
  return out;
}

IndexDef idx(std::initializer_list<std::pair<const char*, SortDirection>> keys) {
  IndexDef def;
  for (const auto& [f, d] : keys) def.keys.push_back({f, d});
  return def;
}

constexpr auto ASC = SortDirection::Asc;
constexpr auto DESC = SortDirection::Desc;

}  // namespace

TEST_SUITE("vocabulary") {
  TEST_CASE("two-field schema has 5 reserved + 13 operators + 2 fields") {
    const Vocabulary v = build_vocabulary(name_age_schema());
    CHECK(v.size() == 20);
    for (const auto& [token, id] : expected_ids(name_age_schema())) {
      CHECK(v.id(token) == id);
      CHECK(v.token(id) == token);
    }
  }

  TEST_CASE("empty schema is rejected") { CHECK_THROWS_AS(build_vocabulary(Schema{}), SchemaError); }

  TEST_CASE("duplicate field names are rejected") {
    CHECK_THROWS_AS(Schema({{"a", AttrType::Int, 10, 0, 9}, {"a", AttrType::Int, 10, 0, 9}}),
                    SchemaError);
  }

  TEST_CASE("field named like an operator token is rejected") {
    CHECK_THROWS_AS(build_vocabulary(Schema({{"count", AttrType::Int, 10, 0, 9}})), SchemaError);
  }

  TEST_CASE("same schema twice gives identical maps") {
    CHECK(build_vocabulary(default_schema()) == build_vocabulary(default_schema()));
  }

  TEST_CASE("unknown tokens map to UNK") {
    const Vocabulary v = build_vocabulary(name_age_schema());
    CHECK(v.id("salary") == Vocabulary::kUnk);
  }

  TEST_CASE("token list must start with the reserved ids") {
    CHECK_THROWS(Vocabulary({"EOS", "PAD"}));
    CHECK_NOTHROW(Vocabulary({"PAD", "EOS", "UNK", "IDX_ASC", "IDX_DESC", "x"}));
  }
}

TEST_SUITE("tokenize") {
  TEST_CASE("worked example: $eq name with ascending index on name, count") {
    const Schema schema = name_age_schema();
    const Vocabulary v = build_vocabulary(schema);
    IndexSet indexes;
    indexes.create(idx({{"name", ASC}}));
    const Query q = eq_count("name", std::string("Jane"));
    const StateTokens s = tokenize(q, indexes, v);
    CHECK(render_tokens(s, v) == std::vector<std::string>{"$eq", "name", "IDX_ASC", "count", "EOS"});
    CHECK(s.ids == ids_of({"$eq", "name", "IDX_ASC", "count", "EOS"}, schema, 32));
  }

  TEST_CASE("same query without indexes has no marker") {
    const Schema schema = name_age_schema();
    const Vocabulary v = build_vocabulary(schema);
    const StateTokens s = tokenize(eq_count("name", std::string("Jane")), IndexSet{}, v);
    CHECK(s.ids == ids_of({"$eq", "name", "count", "EOS"}, schema, 32));
  }

  TEST_CASE("conjunction with a descending index on the second field") {
    const Schema schema = name_age_schema();
    const Vocabulary v = build_vocabulary(schema);
    IndexSet indexes;
    indexes.create(idx({{"age", DESC}, {"name", ASC}}));
    const Query q{make_logical(LogicOp::And, {make_predicate(CmpOp::Eq, "name", std::string("x")),
                                               make_predicate(CmpOp::Gt, "age", std::int64_t{30})}),
                  Aggregation::limit_of(10)};
    const StateTokens s = tokenize(q, indexes, v);
    // Hand walk: and, eq name, gt age + marker, limit, EOS. ids: 11,5,18,6,19,4,16,1.
    CHECK(s.ids == ids_of({"$and", "$eq", "name", "$gt", "age", "IDX_DESC", "limit", "EOS"}, schema, 32));
    CHECK(std::vector<TokenId>(s.ids.begin(), s.ids.begin() + 8) ==
          std::vector<TokenId>{11, 5, 18, 6, 19, 4, 16, 1});
  }

  TEST_CASE("a non-first index key produces no marker") {
    const Vocabulary v = build_vocabulary(name_age_schema());
    IndexSet indexes;
    indexes.create(idx({{"age", ASC}, {"name", ASC}}));
    const StateTokens s = tokenize(eq_count("name", std::string("x")), indexes, v);
    CHECK(render_tokens(s, v) == std::vector<std::string>{"$eq", "name", "count", "EOS"});
  }

  TEST_CASE("sort section lists fields with direction markers") {
    const Vocabulary v = build_vocabulary(name_age_schema());
    const Query q{make_predicate(CmpOp::Lt, "age", std::int64_t{5}),
                  Aggregation::sort_then_limit({{"age", DESC}, {"name", ASC}}, 20)};
    CHECK(render_tokens(tokenize(q, IndexSet{}, v), v) ==
          std::vector<std::string>{"$lt", "age", "sort", "age", "IDX_DESC", "name", "IDX_ASC", "EOS"});
  }

  TEST_CASE("literals never appear, $not and $nin are operator tokens") {
    const Vocabulary v = build_vocabulary(name_age_schema());
    const Query q{make_logical(LogicOp::Not, {make_predicate(CmpOp::Nin, "name",
                                                              StringList{"a", "b"})}),
                  Aggregation::count()};
    CHECK(render_tokens(tokenize(q, IndexSet{}, v), v) ==
          std::vector<std::string>{"$not", "$nin", "name", "count", "EOS"});
  }

  TEST_CASE("long input is truncated with EOS forced at L-1") {
    const Vocabulary v = build_vocabulary(name_age_schema());
    std::vector<Expr> children;
    for (int i = 0; i < 10; ++i) children.push_back(make_predicate(CmpOp::Gt, "age", std::int64_t{i}));
    const Query q{make_logical(LogicOp::Or, std::move(children)), Aggregation::count()};
    TokenizeDiagnostics diag;
    const StateTokens s = tokenize(q, IndexSet{}, v, 8, &diag);
    CHECK(diag.truncated);
    REQUIRE(s.size() == 8);
    CHECK(s.ids[7] == Vocabulary::kEos);
    CHECK(render_tokens(s, v) ==
          std::vector<std::string>{"$or", "$gt", "age", "$gt", "age", "$gt", "age", "EOS"});

    TokenizeDiagnostics short_diag;
    tokenize(eq_count("age", std::int64_t{1}), IndexSet{}, v, 8, &short_diag);
    CHECK_FALSE(short_diag.truncated);
  }

  TEST_CASE("exactly L-1 tokens fit without truncation") {
    const Vocabulary v = build_vocabulary(name_age_schema());
    TokenizeDiagnostics diag;
    const StateTokens s = tokenize(eq_count("age", std::int64_t{1}), IndexSet{}, v, 4, &diag);
    CHECK_FALSE(diag.truncated);
    CHECK(render_tokens(s, v) == std::vector<std::string>{"$eq", "age", "count", "EOS"});
  }

  TEST_CASE("unknown field becomes UNK and is counted") {
    const Vocabulary v = build_vocabulary(name_age_schema());
    TokenizeDiagnostics diag;
    const StateTokens s = tokenize(eq_count("salary", std::int64_t{1}), IndexSet{}, v, 32, &diag);
    CHECK(diag.unknown_tokens == 1);
    CHECK(s.ids[1] == Vocabulary::kUnk);
  }

  TEST_CASE("properties over generated queries and random index sets") {
    const Schema schema = default_schema();
    const Vocabulary v = build_vocabulary(schema);
    QueryGenConfig cfg;
    cfg.seed = 5;
    const auto queries = gen_workload(schema, cfg, 500);
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> pick(0, schema.size() - 1);
    for (const Query& q : queries) {
      IndexSet indexes;
      const int n = static_cast<int>(rng() % 4);
      for (int i = 0; i < n; ++i) {
        indexes.create(idx({{schema.attributes()[pick(rng)].name.c_str(), rng() % 2 ? ASC : DESC}}));
      }
      const StateTokens s = tokenize(q, indexes, v);
      REQUIRE(s.size() == kDefaultStateLength);
      CHECK(s == tokenize(q, indexes, v));

      const auto eos = std::find(s.ids.begin(), s.ids.end(), Vocabulary::kEos);
      REQUIRE(eos != s.ids.end());
      CHECK(std::all_of(eos + 1, s.ids.end(), [](TokenId id) { return id == Vocabulary::kPad; }));
      CHECK(std::all_of(s.ids.begin(), s.ids.end(),
                        [&](TokenId id) { return id >= 0 && static_cast<std::size_t>(id) < v.size(); }));

      // Marker correctness over the predicate section.
      const auto tokens = render_tokens(s, v);
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& t = tokens[i];
        if (t == "count" || t == "limit" || t == "sort") break;
        if (!schema.contains(t)) continue;
        SortDirection dir{};
        const bool indexed = indexes.has_first_key(t, &dir);
        const bool marked = i + 1 < tokens.size() &&
                            (tokens[i + 1] == "IDX_ASC" || tokens[i + 1] == "IDX_DESC");
        CHECK(indexed == marked);
        if (indexed) CHECK(tokens[i + 1] == (dir == ASC ? "IDX_ASC" : "IDX_DESC"));
      }
    }
  }
}

TEST_SUITE("extract_attributes") {
  TEST_CASE("name eq and age gt give [name, age]") {
    const Query q{make_logical(LogicOp::And, {make_predicate(CmpOp::Eq, "name", std::string("x")),
                                               make_predicate(CmpOp::Gt, "age", std::int64_t{3})}),
                  Aggregation::count()};
    CHECK(extract_attributes(q) == std::vector<std::string>{"name", "age"});
  }

  TEST_CASE("single field") {
    CHECK(extract_attributes(eq_count("age", std::int64_t{1})) == std::vector<std::string>{"age"});
  }

  TEST_CASE("repeated field listed once") {
    const Query q{make_logical(LogicOp::Or, {make_predicate(CmpOp::Gt, "age", std::int64_t{3}),
                                              make_predicate(CmpOp::Lt, "age", std::int64_t{1})}),
                  Aggregation::count()};
    CHECK(extract_attributes(q) == std::vector<std::string>{"age"});
  }

  TEST_CASE("sort-only fields come after predicate fields") {
    const Query q{make_predicate(CmpOp::Gt, "age", std::int64_t{3}),
                  Aggregation::sort_then_limit({{"name", ASC}, {"age", DESC}}, 10)};
    CHECK(extract_attributes(q) == std::vector<std::string>{"age", "name"});
  }
}

TEST_SUITE("action codec") {
  TEST_CASE("[3, 0] over [name, age] is an ascending index on age") {
    const auto decoded = decode_action({{3, 0}}, {"name", "age"});
    REQUIRE(decoded.has_value());
    CHECK(*decoded == idx({{"age", ASC}}));
  }

  TEST_CASE("all no-op decodes to none") { CHECK_FALSE(decode_action({{0, 0, 0}}, {"a", "b"})); }

  TEST_CASE("[2, 3, 2] over [a, b] skips the repeated field") {
    CHECK(decode_action({{2, 3, 2}}, {"a", "b"}) == idx({{"a", DESC}, {"b", ASC}}));
  }

  TEST_CASE("out-of-range positions are skipped") {
    CHECK_FALSE(decode_action({{5, 6, 0}}, {"a", "b"}));
    CHECK(decode_action({{5, 1, 0}}, {"a", "b"}) == idx({{"a", ASC}}));
  }

  TEST_CASE("decode table for k=3 over two attributes matches a hand enumeration") {
    const std::vector<std::string> attrs{"a", "b"};
    for (int h0 = 0; h0 < 7; ++h0) {
      for (int h1 = 0; h1 < 7; ++h1) {
        for (int h2 = 0; h2 < 7; ++h2) {
          IndexDef expect;
          for (int h : {h0, h1, h2}) {
            if (h == 0 || h > 4) continue;  // 5,6 point at a missing third attribute
            const std::string f = h <= 2 ? "a" : "b";
            const bool seen = std::any_of(expect.keys.begin(), expect.keys.end(),
                                          [&](const IndexKey& k) { return k.field == f; });
            if (!seen) expect.keys.push_back({f, h % 2 == 1 ? ASC : DESC});
          }
          const MaybeIndex want = expect.keys.empty() ? MaybeIndex{} : MaybeIndex{expect};
          CHECK(decode_action({{h0, h1, h2}}, attrs) == want);
        }
      }
    }
  }

  TEST_CASE("encode examples") {
    CHECK(encode_action(idx({{"age", ASC}}), {"name", "age"}, 2) == ActionVec{{3, 0}});
    CHECK(encode_action(std::nullopt, {"name", "age"}, 3) == ActionVec{{0, 0, 0}});
    CHECK(encode_action(idx({{"b", DESC}, {"a", ASC}}), {"a", "b"}, 3) == ActionVec{{4, 1, 0}});
    CHECK(decode_action({{4, 1, 0}}, {"a", "b"}) == idx({{"b", DESC}, {"a", ASC}}));
  }

  TEST_CASE("encode errors") {
    CHECK_THROWS_AS(encode_action(idx({{"c", ASC}}), {"a", "b"}, 3), EncodingError);
    CHECK_THROWS_AS(encode_action(idx({{"a", ASC}, {"b", ASC}}), {"a", "b"}, 1), EncodingError);
    CHECK_THROWS_AS(encode_action(idx({{"a", ASC}, {"a", DESC}}), {"a", "b"}, 3), EncodingError);
  }

  TEST_CASE("exhaustive round trip over up to three attributes, k=3") {
    const std::vector<std::string> all{"a", "b", "c"};
    std::size_t checked = 0;
    for (std::size_t n = 1; n <= 3; ++n) {
      const std::vector<std::string> attrs(all.begin(), all.begin() + n);
      std::vector<std::size_t> perm(n);
      for (std::size_t len = 1; len <= n; ++len) {
        // every ordered selection of len distinct attributes
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::set<std::vector<std::size_t>> selections;
        do {
          selections.insert(std::vector<std::size_t>(order.begin(), order.begin() + len));
        } while (std::next_permutation(order.begin(), order.end()));
        for (const auto& sel : selections) {
          for (unsigned mask = 0; mask < (1u << len); ++mask) {
            IndexDef def;
            for (std::size_t j = 0; j < len; ++j) {
              def.keys.push_back({attrs[sel[j]], (mask >> j) & 1u ? DESC : ASC});
            }
            const ActionVec a = encode_action(def, attrs, 3);
            CHECK(a.heads.size() == 3);
            CHECK(decode_action(a, attrs) == def);
            ++checked;
          }
        }
      }
    }
    // n=1: 2; n=2: 4 + 8; n=3: 6 + 24 + 48
    CHECK(checked == 2 + 12 + 78);
  }
}

TEST_SUITE("query json") {
  TEST_CASE("generated workload round-trips through JSONL") {
    QueryGenConfig cfg;
    cfg.seed = 9;
    for (const Query& q : gen_workload(default_schema(), cfg, 300)) {
      CHECK(parse_query_line(to_jsonl_line(q)) == q);
    }
  }

  TEST_CASE("field-first leaves and implicit conjunctions parse") {
    const Query q = parse_query_line(
        R"({"expr": {"name": {"$eq": "x"}, "age": {"$gt": 3}}, "agg": {"type": "count"}})");
    REQUIRE_FALSE(q.expr.is_predicate());
    CHECK(q.expr.logical().op == LogicOp::And);
    CHECK(q.expr.logical().children.size() == 2);
    const Query bare = parse_query_line(R"({"expr": {"name": "x"}})");
    CHECK(bare == eq_count("name", std::string("x")));
  }

  TEST_CASE("dates, lists and $not") {
    const Query q = parse_query_line(
        R"({"expr": {"$not": {"$lt": {"d": {"$date": 1262304000000}}}}, "agg": {"type": "sort", "limit": 10, "sort": [["d", "desc"]]}})");
    const Logical& l = q.expr.logical();
    CHECK(l.op == LogicOp::Not);
    CHECK(std::get<DateValue>(l.children[0].predicate().value).millis == 1262304000000);
    CHECK(q.agg.sort == std::vector<SortKey>{{"d", DESC}});
    const Query n = parse_query_line(R"({"expr": {"$nin": {"age": [1, 2]}}})");
    CHECK(std::get<IntList>(n.expr.predicate().value) == IntList{1, 2});
  }

  TEST_CASE("malformed lines are query errors") {
    CHECK_THROWS_AS(parse_query_line("not json"), QueryError);
    CHECK_THROWS_AS(parse_query_line(R"({"agg": {"type": "count"}})"), QueryError);
    CHECK_THROWS_AS(parse_query_line(R"({"expr": {"$xx": {"a": 1}}})"), QueryError);
    CHECK_THROWS_AS(parse_query_line(R"({"expr": {"$eq": {"a": 1}}, "agg": {"type": "limit"}})"),
                    QueryError);
    CHECK_THROWS_AS(parse_query_line(R"({"expr": {"$and": {"a": 1}}})"), QueryError);
  }

  TEST_CASE("read_queries reports the failing line") {
    testing::TempDir dir;
    testing::write_file(dir / "q.jsonl", R"({"expr": {"$eq": {"a": 1}}})"
                                         "\n\nbroken\n");
    try {
      read_queries(dir / "q.jsonl");
      FAIL("expected an error");
    } catch (const QueryError& e) {
      CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
  }

  TEST_CASE("index json round trip") {
    const IndexDef def = idx({{"f1", ASC}, {"f2", DESC}});
    CHECK(index_from_json(to_json(def)) == def);
    CHECK_FALSE(maybe_index_from_json(to_json(MaybeIndex{})));
  }
}

TEST_SUITE("validation") {
  const Schema schema = name_age_schema();

  TEST_CASE("valid query passes") { CHECK_NOTHROW(validate(eq_count("name", std::string("x")), schema)); }

  TEST_CASE("unknown field") {
    CHECK_THROWS_AS(validate(eq_count("salary", std::int64_t{1}), schema), QueryError);
  }

  TEST_CASE("literal type mismatch") {
    CHECK_THROWS_AS(validate(eq_count("age", std::string("x")), schema), QueryError);
  }

  TEST_CASE("$not needs one child, others at least two") {
    const Expr leaf = make_predicate(CmpOp::Eq, "age", std::int64_t{1});
    CHECK_THROWS_AS(validate({make_logical(LogicOp::Not, {leaf, leaf}), Aggregation::count()}, schema),
                    QueryError);
    CHECK_THROWS_AS(validate({make_logical(LogicOp::And, {leaf}), Aggregation::count()}, schema),
                    QueryError);
  }

  TEST_CASE("sort keys distinct and known") {
    const Expr leaf = make_predicate(CmpOp::Eq, "age", std::int64_t{1});
    CHECK_THROWS_AS(
        validate({leaf, Aggregation::sort_then_limit({{"age", ASC}, {"age", DESC}}, 5)}, schema),
        QueryError);
    CHECK_THROWS_AS(validate({leaf, Aggregation::sort_then_limit({{"zzz", ASC}}, 5)}, schema),
                    QueryError);
    CHECK_THROWS_AS(validate({leaf, Aggregation::limit_of(0)}, schema), QueryError);
  }

  TEST_CASE("index definitions") {
    CHECK_NOTHROW(validate(idx({{"a", ASC}}), 3));
    CHECK_THROWS_AS(validate(idx({{"a", ASC}, {"a", DESC}}), 3), QueryError);
    CHECK_THROWS_AS(validate(IndexDef{}, 3), QueryError);
    CHECK_THROWS_AS(validate(idx({{"a", ASC}, {"b", ASC}, {"c", ASC}, {"d", ASC}}), 3), QueryError);
  }

  TEST_CASE("index set semantics") {
    IndexSet s;
    CHECK(s.create(idx({{"a", ASC}})));
    CHECK_FALSE(s.create(idx({{"a", ASC}})));
    CHECK(s.create(idx({{"a", ASC}, {"b", ASC}})));
    CHECK(s.size() == 2);
    CHECK(s.total_keys() == 3);
    CHECK(drop_all(s).empty());
    CHECK(create_index(IndexSet{}, idx({{"a", DESC}})).size() == 1);
  }
}
