#include "ixa/tokenizer.hpp"

namespace ixa {

namespace {

class Emitter {
 public:
  Emitter(const Vocabulary& vocab, TokenizeDiagnostics& diag) : vocab_(vocab), diag_(diag) {}

  void emit(std::string_view token) {
    TokenId id = vocab_.id(token);
    if (id == Vocabulary::kUnk) ++diag_.unknown_tokens;
    out_.push_back(id);
  }
  void emit_id(TokenId id) { out_.push_back(id); }

  std::vector<TokenId>& tokens() { return out_; }

 private:
  const Vocabulary& vocab_;
  TokenizeDiagnostics& diag_;
  std::vector<TokenId> out_;
};

void walk(const Expr& expr, const IndexSet& indexes, Emitter& out) {
  if (expr.is_predicate()) {
    const Predicate& p = expr.predicate();
    out.emit(to_token(p.op));
    out.emit(p.field);
    SortDirection dir{};
    if (indexes.has_first_key(p.field, &dir)) {
      out.emit_id(dir == SortDirection::Asc ? Vocabulary::kIdxAsc : Vocabulary::kIdxDesc);
    }
    return;
  }
  const Logical& l = expr.logical();
  out.emit(to_token(l.op));
  for (const Expr& child : l.children) walk(child, indexes, out);
}

}  // namespace

StateTokens tokenize(const Query& query, const IndexSet& indexes, const Vocabulary& vocab,
                     std::size_t length, TokenizeDiagnostics* diagnostics) {
  TokenizeDiagnostics local;
  TokenizeDiagnostics& diag = diagnostics ? *diagnostics : local;
  diag = {};

  Emitter out(vocab, diag);
  walk(query.expr, indexes, out);
  switch (query.agg.kind) {
    case AggKind::Count: out.emit("count"); break;
    case AggKind::Limit: out.emit("limit"); break;
    case AggKind::SortThenLimit:
      out.emit("sort");
      for (const SortKey& key : query.agg.sort) {
        out.emit(key.field);
        out.emit_id(key.direction == SortDirection::Asc ? Vocabulary::kIdxAsc : Vocabulary::kIdxDesc);
      }
      break;
  }

  std::vector<TokenId>& ids = out.tokens();
  if (length == 0) return StateTokens{};
  if (ids.size() + 1 > length) {
    diag.truncated = true;
    ids.resize(length - 1);
  }
  ids.push_back(Vocabulary::kEos);
  ids.resize(length, Vocabulary::kPad);
  return StateTokens{std::move(ids)};
}

std::vector<std::string> render_tokens(const StateTokens& state, const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (TokenId id : state.ids) {
    out.push_back(vocab.token(id));
    if (id == Vocabulary::kEos) break;
  }
  return out;
}

}  // namespace ixa
