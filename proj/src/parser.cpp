#include "sdql/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "sdql/errors.hpp"

namespace sdql {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Tok {
  End, Ident, Int, Real, String,
  LBrace, RBrace, LParen, RParen, Lt, Gt, LArr, RArr,  // { } ( ) < > [| |]
  Comma, Dot, Colon, Assign, Underscore,
  Arrow, BindArrow,          // -> <-
  Eq, Ne, Le, Ge, AndAnd, OrOr, Plus, Star, Slash, Bang,
};

struct Token {
  Tok kind;
  std::string text;
  int64_t ival = 0;
  double rval = 0.0;
  int line = 1, col = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& cur() const { return cur_; }

  void advance() {
    skip_ws();
    cur_.line = line_;
    cur_.col = col_;
    if (pos_ >= src_.size()) {
      cur_.kind = Tok::End;
      cur_.text.clear();
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      // A lone underscore is the subscript marker; identifiers may still
      // contain underscores.
      if (c == '_' && (pos_ + 1 >= src_.size() ||
                       !(std::isalnum(static_cast<unsigned char>(src_[pos_ + 1])) ||
                         src_[pos_ + 1] == '_'))) {
        take(Tok::Underscore, 1);
        return;
      }
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        bump();
      cur_.kind = Tok::Ident;
      cur_.text = src_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() &&
         (std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) ||
          src_.compare(pos_ + 1, 3, "inf") == 0))) {
      lex_number();
      return;
    }
    if (c == '"') {
      lex_string();
      return;
    }
    switch (c) {
      case '{': take(Tok::LBrace, 1); return;
      case '}': take(Tok::RBrace, 1); return;
      case '(': take(Tok::LParen, 1); return;
      case ')': take(Tok::RParen, 1); return;
      case ',': take(Tok::Comma, 1); return;
      case '.': take(Tok::Dot, 1); return;
      case ':': take(Tok::Colon, 1); return;
      case '+': take(Tok::Plus, 1); return;
      case '*': take(Tok::Star, 1); return;
      case '/': take(Tok::Slash, 1); return;
      case '[':
        if (peek(1) == '|') { take(Tok::LArr, 2); return; }
        break;
      case '|':
        if (peek(1) == ']') { take(Tok::RArr, 2); return; }
        if (peek(1) == '|') { take(Tok::OrOr, 2); return; }
        break;
      case '&':
        if (peek(1) == '&') { take(Tok::AndAnd, 2); return; }
        break;
      case '-':
        if (peek(1) == '>') { take(Tok::Arrow, 2); return; }
        break;
      case '<':
        if (peek(1) == '-') { take(Tok::BindArrow, 2); return; }
        if (peek(1) == '=') { take(Tok::Le, 2); return; }
        take(Tok::Lt, 1);
        return;
      case '>':
        if (peek(1) == '=') { take(Tok::Ge, 2); return; }
        take(Tok::Gt, 1);
        return;
      case '=':
        if (peek(1) == '=') { take(Tok::Eq, 2); return; }
        take(Tok::Assign, 1);
        return;
      case '!':
        if (peek(1) == '=') { take(Tok::Ne, 2); return; }
        take(Tok::Bang, 1);
        return;
      default:
        break;
    }
    parse_error("unknown-token", std::string("unexpected character '") + c + "'",
                line_, col_);
  }

private:
  char peek(size_t off) const {
    return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
  }

  void bump() {
    if (src_[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
    ++pos_;
  }

  void take(Tok kind, size_t n) {
    cur_.kind = kind;
    cur_.text = src_.substr(pos_, n);
    for (size_t i = 0; i < n; ++i) bump();
  }

  void skip_ws() {
    for (;;) {
      while (pos_ < src_.size() &&
             std::isspace(static_cast<unsigned char>(src_[pos_])))
        bump();
      if (pos_ + 1 < src_.size() && src_[pos_] == '/' && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
  }

  void lex_number() {
    size_t start = pos_;
    bool neg = false;
    if (src_[pos_] == '-') { neg = true; bump(); }
    if (src_.compare(pos_, 3, "inf") == 0) {
      bump(); bump(); bump();
      cur_.kind = Tok::Real;
      cur_.rval = neg ? -kInf : kInf;
      return;
    }
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
      bump();
    bool is_real = false;
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      is_real = true;
      bump();
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        bump();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      size_t save = pos_;
      bump();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) bump();
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        is_real = true;
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_])))
          bump();
      } else {
        pos_ = save;  // not an exponent; leave 'e...' for the next token
      }
    }
    std::string text = src_.substr(start, pos_ - start);
    if (is_real) {
      cur_.kind = Tok::Real;
      cur_.rval = std::strtod(text.c_str(), nullptr);
    } else {
      cur_.kind = Tok::Int;
      cur_.ival = std::strtoll(text.c_str(), nullptr, 10);
    }
  }

  void lex_string() {
    bump();  // opening quote
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      char c = src_[pos_];
      if (c == '\\' && pos_ + 1 < src_.size()) {
        bump();
        char e = src_[pos_];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: out += e; break;
        }
        bump();
      } else {
        out += c;
        bump();
      }
    }
    if (pos_ >= src_.size())
      parse_error("unterminated-string", "string literal never closes", line_, col_);
    bump();  // closing quote
    cur_.kind = Tok::String;
    cur_.text = std::move(out);
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token cur_;
};

class Parser {
public:
  explicit Parser(const std::string& src) : lex_(src) {}

  ExprPtr parse_program() {
    ExprPtr e = parse_expr();
    expect_end();
    return e;
  }

  TypePtr parse_type_only() {
    TypePtr t = parse_type();
    expect_end();
    return t;
  }

  void expect_end() {
    if (lex_.cur().kind != Tok::End)
      fail("syntax-error", "unexpected trailing input");
  }

  ExprPtr parse_expr() {
    if (is_kw("sum")) return parse_sum();
    if (is_kw("let")) return parse_let();
    if (is_kw("if")) return parse_if();
    return parse_or();
  }

private:
  [[noreturn]] void fail(const std::string& code, const std::string& msg) {
    parse_error(code, msg, lex_.cur().line, lex_.cur().col);
  }

  bool is_kw(const char* kw) const {
    return lex_.cur().kind == Tok::Ident && lex_.cur().text == kw;
  }

  bool at(Tok k) const { return lex_.cur().kind == k; }

  bool accept(Tok k) {
    if (!at(k)) return false;
    lex_.advance();
    return true;
  }

  void expect(Tok k, const char* what) {
    if (!accept(k)) fail("syntax-error", std::string("expected ") + what);
  }

  std::string expect_ident() {
    if (!at(Tok::Ident)) fail("syntax-error", "expected identifier");
    std::string s = lex_.cur().text;
    lex_.advance();
    return s;
  }

  ExprPtr parse_sum() {
    int line = lex_.cur().line, col = lex_.cur().col;
    lex_.advance();  // sum
    expect(Tok::LParen, "'('");
    std::string var = expect_ident();
    if (!accept(Tok::BindArrow)) {
      if (!is_kw("in")) fail("syntax-error", "expected 'in' or '<-' in sum");
      lex_.advance();
    }
    ExprPtr src = parse_expr();
    expect(Tok::RParen, "')'");
    ExprPtr body = parse_expr();
    auto e = std::const_pointer_cast<Expr>(mk_sum(var, src, body));
    e->line = line;
    e->col = col;
    return e;
  }

  ExprPtr parse_let() {
    lex_.advance();  // let
    std::string var = expect_ident();
    expect(Tok::Assign, "'='");
    ExprPtr bound = parse_expr();
    if (is_kw("in")) lex_.advance();  // 'in' is optional
    ExprPtr body = parse_expr();
    return mk_let(var, bound, body);
  }

  ExprPtr parse_if() {
    lex_.advance();  // if
    expect(Tok::LParen, "'('");
    ExprPtr cond = parse_expr();
    expect(Tok::RParen, "')'");
    if (is_kw("then")) lex_.advance();  // 'then' is optional
    ExprPtr then_e = parse_expr();
    ExprPtr else_e;
    if (is_kw("else")) {
      lex_.advance();
      else_e = parse_expr();
    }
    return mk_if(cond, then_e, else_e);
  }

  ExprPtr parse_or() {
    ExprPtr e = parse_and();
    while (accept(Tok::OrOr)) e = mk_add(e, parse_and());
    return e;
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_cmp();
    while (accept(Tok::AndAnd)) e = mk_mul(e, parse_cmp());
    return e;
  }

  ExprPtr parse_cmp() {
    ExprPtr e = parse_add();
    switch (lex_.cur().kind) {
      case Tok::Eq: lex_.advance(); return mk_cmp(CmpOp::Eq, e, parse_add());
      case Tok::Ne: lex_.advance(); return mk_cmp(CmpOp::Ne, e, parse_add());
      case Tok::Lt: lex_.advance(); return mk_cmp(CmpOp::Lt, e, parse_add());
      case Tok::Le: lex_.advance(); return mk_cmp(CmpOp::Le, e, parse_add());
      case Tok::Gt:
        // Inside a record literal a bare '>' closes the record; a
        // greater-than there needs parentheses.
        if (no_gt_) return e;
        lex_.advance();
        return mk_cmp(CmpOp::Lt, parse_add(), e);
      case Tok::Ge:
        if (no_gt_) return e;
        lex_.advance();
        return mk_cmp(CmpOp::Le, parse_add(), e);
      default: return e;
    }
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    while (accept(Tok::Plus)) e = mk_add(e, parse_mul());
    return e;
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_unary();
    for (;;) {
      if (accept(Tok::Star))
        e = mk_mul(e, parse_unary());
      else if (accept(Tok::Slash))
        e = mk_div(e, parse_unary());
      else
        return e;
    }
  }

  ExprPtr parse_unary() {
    if (accept(Tok::Bang)) return mk_not(parse_unary());
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_atom();
    for (;;) {
      if (accept(Tok::Dot)) {
        e = mk_field(e, expect_ident());
      } else if (at(Tok::LParen)) {
        lex_.advance();
        bool saved = no_gt_;
        no_gt_ = false;
        ExprPtr key = parse_expr();
        no_gt_ = saved;
        expect(Tok::RParen, "')'");
        e = mk_lookup(e, key);
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_atom() {
    const Token& t = lex_.cur();
    switch (t.kind) {
      case Tok::Int: {
        int64_t n = t.ival;
        lex_.advance();
        return mk_int(n);
      }
      case Tok::Real: {
        double r = t.rval;
        lex_.advance();
        return mk_real(r);
      }
      case Tok::String: {
        std::string s = t.text;
        lex_.advance();
        return mk_string(s);
      }
      case Tok::LParen: {
        lex_.advance();
        bool saved = no_gt_;
        no_gt_ = false;
        ExprPtr e = parse_expr();
        no_gt_ = saved;
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Lt:
        return parse_record_lit();
      case Tok::LBrace:
        return parse_brace();
      case Tok::LArr:
        return parse_array_lit();
      case Tok::Ident:
        return parse_ident_atom();
      default:
        fail("syntax-error", "expected expression");
    }
  }

  ExprPtr parse_record_lit() {
    lex_.advance();  // <
    std::vector<std::string> names;
    std::vector<ExprPtr> kids;
    if (!accept(Tok::Gt)) {
      bool saved = no_gt_;
      no_gt_ = true;
      do {
        names.push_back(expect_ident());
        expect(Tok::Assign, "'='");
        kids.push_back(parse_expr());
      } while (accept(Tok::Comma));
      no_gt_ = saved;
      expect(Tok::Gt, "'>'");
    }
    return mk_record(std::move(names), std::move(kids));
  }

  // { } [_{T,T}] | { k -> v, ... } | { e, ... } (set literal)
  struct NoGtReset {
    bool* flag;
    bool saved;
    explicit NoGtReset(bool* f) : flag(f), saved(*f) { *f = false; }
    ~NoGtReset() { *flag = saved; }
  };

  ExprPtr parse_brace() {
    NoGtReset guard(&no_gt_);
    lex_.advance();  // {
    if (accept(Tok::RBrace)) {
      TypePtr k, v;
      if (accept(Tok::Underscore)) {
        expect(Tok::LBrace, "'{'");
        k = parse_type();
        expect(Tok::Comma, "','");
        v = parse_type();
        expect(Tok::RBrace, "'}'");
      }
      return mk_empty_dict(k, v);
    }
    ExprPtr first = parse_expr();
    if (accept(Tok::Arrow)) {
      std::vector<ExprPtr> kvs;
      kvs.push_back(first);
      kvs.push_back(parse_expr());
      while (accept(Tok::Comma)) {
        kvs.push_back(parse_expr());
        expect(Tok::Arrow, "'->'");
        kvs.push_back(parse_expr());
      }
      expect(Tok::RBrace, "'}'");
      return mk_dict(std::move(kvs));
    }
    // Set literal: { e0, ..., ek } desugars to { e0 -> true, ... }.
    std::vector<ExprPtr> kvs;
    kvs.push_back(first);
    kvs.push_back(mk_bool(true));
    while (accept(Tok::Comma)) {
      kvs.push_back(parse_expr());
      kvs.push_back(mk_bool(true));
    }
    expect(Tok::RBrace, "'}'");
    return mk_dict(std::move(kvs));
  }

  // [| e0, ..., ek |] desugars to the dense dictionary { 0 -> e0, ... };
  // [| |]_{T} is the empty dense array of element type T.
  ExprPtr parse_array_lit() {
    NoGtReset guard(&no_gt_);
    lex_.advance();  // [|
    if (accept(Tok::RArr)) {
      TypePtr elem;
      if (accept(Tok::Underscore)) {
        expect(Tok::LBrace, "'{'");
        elem = parse_type();
        expect(Tok::RBrace, "'}'");
      }
      return mk_empty_dict(int_type(), elem, /*dense=*/true);
    }
    std::vector<ExprPtr> kvs;
    int64_t idx = 0;
    do {
      kvs.push_back(mk_int(idx++));
      kvs.push_back(parse_expr());
    } while (accept(Tok::Comma));
    expect(Tok::RArr, "'|]'");
    return mk_dict(std::move(kvs), /*dense=*/true);
  }

  ExprPtr parse_ident_atom() {
    std::string id = lex_.cur().text;
    if (id == "true") { lex_.advance(); return mk_bool(true); }
    if (id == "false") { lex_.advance(); return mk_bool(false); }
    if (id == "inf") { lex_.advance(); return mk_real(kInf); }
    if (id == "dom") return parse_dom();
    if (id == "range") return parse_range();
    if (id == "concat") return parse_concat();
    // '_' is an identifier character, so "promote_{" lexes the underscore
    // into the keyword.
    if (id == "promote" || id == "promote_")
      return parse_promote(/*glued_underscore=*/id == "promote_");
    if (id.rfind("to_", 0) == 0) {
      if (auto k = scalar_kind_by_name(id.substr(3)); k && is_tagged(*k))
        return parse_ring_cast(*k, /*to=*/true);
    }
    if (id.rfind("from_", 0) == 0) {
      if (auto k = scalar_kind_by_name(id.substr(5)); k && is_tagged(*k))
        return parse_ring_cast(*k, /*to=*/false);
    }
    if (auto k = scalar_kind_by_name(id); k && is_tagged(*k))
      return parse_tagged_literal(*k);
    lex_.advance();
    return mk_var(id);
  }

  static bool is_tagged(ScalarKind k) {
    switch (k) {
      case ScalarKind::Nat:
      case ScalarKind::MinProd:
      case ScalarKind::MaxProd:
      case ScalarKind::MinSum:
      case ScalarKind::MaxSum:
      case ScalarKind::MaxMin:
        return true;
      default:
        return false;
    }
  }

  // dom(e) desugars to sum(x <- e) { x.key }.
  ExprPtr parse_dom() {
    lex_.advance();
    expect(Tok::LParen, "'('");
    ExprPtr e = parse_expr();
    expect(Tok::RParen, "')'");
    std::string x = fresh_var("x", {e});
    return mk_sum(x, e,
                  mk_dict({mk_field(mk_var(x), "key"), mk_bool(true)}));
  }

  // range(n) with an integer literal desugars to { 0 -> true, ..., n-1 -> true }.
  ExprPtr parse_range() {
    lex_.advance();
    expect(Tok::LParen, "'('");
    if (!at(Tok::Int))
      fail("range-needs-literal", "range requires an integer literal");
    int64_t n = lex_.cur().ival;
    lex_.advance();
    expect(Tok::RParen, "')'");
    std::vector<ExprPtr> kvs;
    for (int64_t i = 0; i < n; ++i) {
      kvs.push_back(mk_int(i));
      kvs.push_back(mk_bool(true));
    }
    if (kvs.empty()) return mk_empty_dict(int_type(), bool_type(), /*dense=*/true);
    return mk_dict(std::move(kvs), /*dense=*/true);
  }

  ExprPtr parse_concat() {
    lex_.advance();
    expect(Tok::LParen, "'('");
    ExprPtr l = parse_expr();
    expect(Tok::Comma, "','");
    ExprPtr r = parse_expr();
    expect(Tok::RParen, "')'");
    return mk_concat(l, r);
  }

  ExprPtr parse_promote(bool glued_underscore) {
    lex_.advance();
    if (!glued_underscore) expect(Tok::Underscore, "'_'");
    expect(Tok::LBrace, "'{'");
    ScalarKind from = expect_scalar_kind();
    expect(Tok::Comma, "','");
    ScalarKind to = expect_scalar_kind();
    expect(Tok::RBrace, "'}'");
    expect(Tok::LParen, "'('");
    ExprPtr e = parse_expr();
    expect(Tok::RParen, "')'");
    return mk_promote(from, to, e);
  }

  ScalarKind expect_scalar_kind() {
    std::string id = expect_ident();
    auto k = scalar_kind_by_name(id);
    if (!k) fail("syntax-error", "expected scalar type name, got '" + id + "'");
    return *k;
  }

  ExprPtr parse_ring_cast(ScalarKind ring, bool to) {
    lex_.advance();
    expect(Tok::LParen, "'('");
    ExprPtr e = parse_expr();
    expect(Tok::RParen, "')'");
    return to ? mk_to_ring(ring, e) : mk_from_ring(ring, e);
  }

  // min_sum(3.0), nat(4): tagged scalar literal.
  ExprPtr parse_tagged_literal(ScalarKind kind) {
    lex_.advance();
    expect(Tok::LParen, "'('");
    Value v;
    if (kind == ScalarKind::Nat) {
      if (!at(Tok::Int)) fail("syntax-error", "nat literal requires an integer");
      v = Value::integer(lex_.cur().ival, ScalarKind::Nat);
      lex_.advance();
    } else {
      double r;
      if (at(Tok::Real)) r = lex_.cur().rval;
      else if (at(Tok::Int)) r = static_cast<double>(lex_.cur().ival);
      else if (at(Tok::Ident) && lex_.cur().text == "inf") r = kInf;
      else fail("syntax-error", "tagged literal requires a numeric literal");
      lex_.advance();
      v = Value::real(r, kind);
    }
    expect(Tok::RParen, "')'");
    return mk_const(v, scalar_type(kind));
  }

  TypePtr parse_type() {
    const Token& t = lex_.cur();
    if (t.kind == Tok::LBrace) {
      lex_.advance();
      TypePtr k = parse_type();
      if (accept(Tok::Arrow)) {
        TypePtr v = parse_type();
        expect(Tok::RBrace, "'}'");
        return dict_type(k, v);
      }
      expect(Tok::RBrace, "'}'");
      return set_type(k);  // { T } is the set type { T -> bool }
    }
    if (t.kind == Tok::LArr) {
      lex_.advance();
      TypePtr elem = parse_type();
      expect(Tok::RArr, "'|]'");
      return array_type(elem);
    }
    if (t.kind == Tok::Lt) {
      lex_.advance();
      std::vector<std::pair<std::string, TypePtr>> fields;
      if (!accept(Tok::Gt)) {
        do {
          std::string name = expect_ident();
          expect(Tok::Colon, "':'");
          fields.emplace_back(name, parse_type());
        } while (accept(Tok::Comma));
        expect(Tok::Gt, "'>'");
      }
      return record_type(std::move(fields));
    }
    if (t.kind == Tok::Ident) {
      // "double" is accepted as an alias for real.
      if (t.text == "double") {
        lex_.advance();
        return real_type();
      }
      if (auto k = scalar_kind_by_name(t.text)) {
        lex_.advance();
        return scalar_type(*k);
      }
    }
    fail("syntax-error", "expected type");
  }

  Lexer lex_;
  bool no_gt_ = false;  // a bare '>' closes the enclosing record literal
};

} // namespace

ExprPtr parse(const std::string& text) {
  Parser p(text);
  return p.parse_program();
}

TypePtr parse_type(const std::string& text) {
  Parser p(text);
  return p.parse_type_only();
}

namespace {

// Reduces a closed literal expression tree to a Value.
Value literal_eval(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Const:
      return e->cval;
    case Expr::Kind::EmptyDict:
      return Value::empty_dict(e->dense);
    case Expr::Kind::RecordLit: {
      std::vector<std::pair<std::string, Value>> fields;
      for (size_t i = 0; i < e->kids.size(); ++i)
        fields.emplace_back(e->names[i], literal_eval(e->kids[i]));
      return Value::record(std::move(fields));
    }
    case Expr::Kind::DictLit: {
      std::vector<std::pair<Value, Value>> entries;
      for (size_t i = 0; i + 1 < e->kids.size(); i += 2)
        entries.emplace_back(literal_eval(e->kids[i]),
                             literal_eval(e->kids[i + 1]));
      return Value::dict(std::move(entries), e->dense);
    }
    default:
      parse_error("value-syntax-error",
                  "value text must consist of literals only", e->line, e->col);
  }
}

} // namespace

Value parse_value(const std::string& text) {
  return canonicalize(literal_eval(parse(text)));
}

namespace {

// Precedence levels for printing: 0 statement-like (sum/let/if), 1 ||,
// 2 &&, 3 cmp, 4 +, 5 * and /, 6 unary, 7 postfix.
int prec_of(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Sum:
    case Expr::Kind::Let:
    case Expr::Kind::If:
      return 0;
    case Expr::Kind::Cmp: return 3;
    case Expr::Kind::Add: return 4;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 5;
    case Expr::Kind::Not: return 6;
    case Expr::Kind::Lookup:
    case Expr::Kind::Field: return 7;
    default: return 8;
  }
}

void pp(const ExprPtr& e, std::ostream& os, int min_prec);

void pp_paren(const ExprPtr& e, std::ostream& os, int min_prec) {
  if (prec_of(*e) < min_prec) {
    os << "(";
    pp(e, os, 0);
    os << ")";
  } else {
    pp(e, os, min_prec);
  }
}

void pp(const ExprPtr& e, std::ostream& os, int min_prec) {
  switch (e->kind) {
    case Expr::Kind::Sum:
      os << "sum(" << e->name << " <- ";
      pp(e->kids[0], os, 0);
      os << ") ";
      pp_paren(e->kids[1], os, 0);
      return;
    case Expr::Kind::Let:
      os << "let " << e->name << " = ";
      pp_paren(e->kids[0], os, 1);
      os << " in ";
      pp(e->kids[1], os, 0);
      return;
    case Expr::Kind::If:
      os << "if (";
      pp(e->kids[0], os, 0);
      os << ") then ";
      pp_paren(e->kids[1], os, e->kids.size() == 3 ? 1 : 0);
      if (e->kids.size() == 3) {
        os << " else ";
        pp(e->kids[2], os, 0);
      }
      return;
    case Expr::Kind::DictLit: {
      if (e->dense) {
        os << "[| ";
        for (size_t i = 1; i < e->kids.size(); i += 2) {
          if (i > 1) os << ", ";
          pp_paren(e->kids[i], os, 1);
        }
        os << " |]";
        return;
      }
      os << "{ ";
      for (size_t i = 0; i + 1 < e->kids.size(); i += 2) {
        if (i > 0) os << ", ";
        pp_paren(e->kids[i], os, 1);
        os << " -> ";
        pp_paren(e->kids[i + 1], os, 1);
      }
      os << " }";
      return;
    }
    case Expr::Kind::EmptyDict:
      if (e->dense) {
        os << "[| |]";
        if (e->t2) os << "_{" << type_to_string(e->t2) << "}";
        return;
      }
      os << "{ }";
      if (e->t1 && e->t2)
        os << "_{" << type_to_string(e->t1) << "," << type_to_string(e->t2) << "}";
      return;
    case Expr::Kind::Lookup:
      pp_paren(e->kids[0], os, 7);
      os << "(";
      pp(e->kids[1], os, 0);
      os << ")";
      return;
    case Expr::Kind::RecordLit: {
      os << "<";
      for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i > 0) os << ", ";
        os << e->names[i] << " = ";
        pp_paren(e->kids[i], os, 1);
      }
      os << ">";
      return;
    }
    case Expr::Kind::Field:
      pp_paren(e->kids[0], os, 7);
      os << "." << e->name;
      return;
    case Expr::Kind::Var:
      os << e->name;
      return;
    case Expr::Kind::Add:
      pp_paren(e->kids[0], os, 4);
      os << " + ";
      pp_paren(e->kids[1], os, 5);
      return;
    case Expr::Kind::Mul:
      pp_paren(e->kids[0], os, 5);
      os << " * ";
      pp_paren(e->kids[1], os, 6);
      return;
    case Expr::Kind::Div:
      pp_paren(e->kids[0], os, 5);
      os << " / ";
      pp_paren(e->kids[1], os, 6);
      return;
    case Expr::Kind::Cmp:
      pp_paren(e->kids[0], os, 4);
      os << " " << cmp_op_name(e->cmp) << " ";
      pp_paren(e->kids[1], os, 4);
      return;
    case Expr::Kind::Not:
      os << "!";
      pp_paren(e->kids[0], os, 6);
      return;
    case Expr::Kind::Concat:
      os << "concat(";
      pp(e->kids[0], os, 0);
      os << ", ";
      pp(e->kids[1], os, 0);
      os << ")";
      return;
    case Expr::Kind::Promote:
      os << "promote_{" << scalar_kind_name(e->prom_from) << ","
         << scalar_kind_name(e->prom_to) << "}(";
      pp(e->kids[0], os, 0);
      os << ")";
      return;
    case Expr::Kind::ToRing:
      os << "to_" << scalar_kind_name(e->ring) << "(";
      pp(e->kids[0], os, 0);
      os << ")";
      return;
    case Expr::Kind::FromRing:
      os << "from_" << scalar_kind_name(e->ring) << "(";
      pp(e->kids[0], os, 0);
      os << ")";
      return;
    case Expr::Kind::Const:
      if (e->cval.is_dict() && e->cval.entries().empty() && e->ctype &&
          e->ctype->is_dict()) {
        os << "{ }_{" << type_to_string(e->ctype->key) << ","
           << type_to_string(e->ctype->val) << "}";
        return;
      }
      os << dump_value(e->cval);
      return;
  }
}

} // namespace

std::string pretty(const ExprPtr& e) {
  std::ostringstream os;
  pp(e, os, 0);
  return os.str();
}

} // namespace sdql
