#include "sdql/ast.hpp"

#include <map>

#include "sdql/errors.hpp"

namespace sdql {

const char* cmp_op_name(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
  }
  return "?";
}

namespace {
std::shared_ptr<Expr> node(Expr::Kind k) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  return e;
}
} // namespace

ExprPtr mk_sum(std::string var, ExprPtr src, ExprPtr body, TypePtr body_type) {
  auto e = node(Expr::Kind::Sum);
  e->name = std::move(var);
  e->kids = {std::move(src), std::move(body)};
  e->body_type = std::move(body_type);
  return e;
}

ExprPtr mk_dict(std::vector<ExprPtr> kvs, bool dense) {
  auto e = node(Expr::Kind::DictLit);
  e->kids = std::move(kvs);
  e->dense = dense;
  return e;
}

ExprPtr mk_empty_dict(TypePtr key, TypePtr val, bool dense) {
  auto e = node(Expr::Kind::EmptyDict);
  e->t1 = std::move(key);
  e->t2 = std::move(val);
  e->dense = dense;
  return e;
}

ExprPtr mk_lookup(ExprPtr dict, ExprPtr key) {
  auto e = node(Expr::Kind::Lookup);
  e->kids = {std::move(dict), std::move(key)};
  return e;
}

ExprPtr mk_record(std::vector<std::string> names, std::vector<ExprPtr> kids) {
  auto e = node(Expr::Kind::RecordLit);
  e->names = std::move(names);
  e->kids = std::move(kids);
  return e;
}

ExprPtr mk_field(ExprPtr rec, std::string name) {
  auto e = node(Expr::Kind::Field);
  e->kids = {std::move(rec)};
  e->name = std::move(name);
  return e;
}

ExprPtr mk_let(std::string var, ExprPtr bound, ExprPtr body) {
  auto e = node(Expr::Kind::Let);
  e->name = std::move(var);
  e->kids = {std::move(bound), std::move(body)};
  return e;
}

ExprPtr mk_var(std::string name) {
  auto e = node(Expr::Kind::Var);
  e->name = std::move(name);
  return e;
}

ExprPtr mk_if(ExprPtr cond, ExprPtr then_e, ExprPtr else_e) {
  auto e = node(Expr::Kind::If);
  e->kids = {std::move(cond), std::move(then_e)};
  if (else_e) e->kids.push_back(std::move(else_e));
  return e;
}

ExprPtr mk_add(ExprPtr l, ExprPtr r) {
  auto e = node(Expr::Kind::Add);
  e->kids = {std::move(l), std::move(r)};
  return e;
}

ExprPtr mk_mul(ExprPtr l, ExprPtr r) {
  auto e = node(Expr::Kind::Mul);
  e->kids = {std::move(l), std::move(r)};
  return e;
}

ExprPtr mk_promote(ScalarKind from, ScalarKind to, ExprPtr e0) {
  auto e = node(Expr::Kind::Promote);
  e->prom_from = from;
  e->prom_to = to;
  e->kids = {std::move(e0)};
  return e;
}

ExprPtr mk_const(Value v, TypePtr t) {
  auto e = node(Expr::Kind::Const);
  e->cval = std::move(v);
  e->ctype = std::move(t);
  return e;
}

ExprPtr mk_int(int64_t n) { return mk_const(Value::integer(n), int_type()); }
ExprPtr mk_real(double r) { return mk_const(Value::real(r), real_type()); }
ExprPtr mk_bool(bool b) { return mk_const(Value::boolean(b), bool_type()); }
ExprPtr mk_string(std::string s) {
  return mk_const(Value::string(std::move(s)), string_type());
}

ExprPtr mk_cmp(CmpOp op, ExprPtr l, ExprPtr r) {
  auto e = node(Expr::Kind::Cmp);
  e->cmp = op;
  e->kids = {std::move(l), std::move(r)};
  return e;
}

ExprPtr mk_not(ExprPtr e0) {
  auto e = node(Expr::Kind::Not);
  e->kids = {std::move(e0)};
  return e;
}

ExprPtr mk_concat(ExprPtr l, ExprPtr r) {
  auto e = node(Expr::Kind::Concat);
  e->kids = {std::move(l), std::move(r)};
  return e;
}

ExprPtr mk_div(ExprPtr l, ExprPtr r) {
  auto e = node(Expr::Kind::Div);
  e->kids = {std::move(l), std::move(r)};
  return e;
}

ExprPtr mk_to_ring(ScalarKind ring, ExprPtr e0) {
  auto e = node(Expr::Kind::ToRing);
  e->ring = ring;
  e->kids = {std::move(e0)};
  return e;
}

ExprPtr mk_from_ring(ScalarKind ring, ExprPtr e0) {
  auto e = node(Expr::Kind::FromRing);
  e->ring = ring;
  e->kids = {std::move(e0)};
  return e;
}

ExprPtr field_of(const std::string& var, const std::string& f) {
  return mk_field(mk_var(var), f);
}
ExprPtr field_of(const std::string& var, const std::string& f1,
                 const std::string& f2) {
  return mk_field(mk_field(mk_var(var), f1), f2);
}

namespace {

bool equal_impl(const ExprPtr& a, const ExprPtr& b, bool alpha,
                std::map<std::string, std::string>& ren) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  if (a->kids.size() != b->kids.size()) return false;
  if (a->names != b->names) return false;
  if (a->dense != b->dense) return false;
  switch (a->kind) {
    case Expr::Kind::Var: {
      if (!alpha) return a->name == b->name;
      auto it = ren.find(a->name);
      return it != ren.end() ? it->second == b->name : a->name == b->name;
    }
    case Expr::Kind::Field:
      if (a->name != b->name) return false;
      break;
    case Expr::Kind::EmptyDict: {
      if ((a->t1 == nullptr) != (b->t1 == nullptr)) return false;
      if (a->t1 && !types_equal(a->t1, b->t1)) return false;
      if ((a->t2 == nullptr) != (b->t2 == nullptr)) return false;
      if (a->t2 && !types_equal(a->t2, b->t2)) return false;
      break;
    }
    case Expr::Kind::Promote:
      if (a->prom_from != b->prom_from || a->prom_to != b->prom_to) return false;
      break;
    case Expr::Kind::Const:
      if (compare_values(a->cval, b->cval) != 0) return false;
      break;
    case Expr::Kind::Cmp:
      if (a->cmp != b->cmp) return false;
      break;
    case Expr::Kind::ToRing:
    case Expr::Kind::FromRing:
      if (a->ring != b->ring) return false;
      break;
    default:
      break;
  }
  if (a->kind == Expr::Kind::Sum || a->kind == Expr::Kind::Let) {
    if (!equal_impl(a->kids[0], b->kids[0], alpha, ren)) return false;
    if (alpha) {
      auto saved = ren;
      ren[a->name] = b->name;
      bool ok = equal_impl(a->kids[1], b->kids[1], alpha, ren);
      ren = saved;
      return ok;
    }
    return a->name == b->name && equal_impl(a->kids[1], b->kids[1], alpha, ren);
  }
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!equal_impl(a->kids[i], b->kids[i], alpha, ren)) return false;
  return true;
}

} // namespace

bool exprs_equal(const ExprPtr& a, const ExprPtr& b) {
  std::map<std::string, std::string> ren;
  return equal_impl(a, b, false, ren);
}

bool alpha_equal(const ExprPtr& a, const ExprPtr& b) {
  std::map<std::string, std::string> ren;
  return equal_impl(a, b, true, ren);
}

namespace {

void free_vars_impl(const ExprPtr& e, std::set<std::string>& bound,
                    std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case Expr::Kind::Var:
      if (!bound.count(e->name)) out.insert(e->name);
      return;
    case Expr::Kind::Sum:
    case Expr::Kind::Let: {
      free_vars_impl(e->kids[0], bound, out);
      bool inserted = bound.insert(e->name).second;
      free_vars_impl(e->kids[1], bound, out);
      if (inserted) bound.erase(e->name);
      return;
    }
    default:
      for (const auto& k : e->kids) free_vars_impl(k, bound, out);
  }
}

} // namespace

std::set<std::string> free_vars(const ExprPtr& e) {
  std::set<std::string> bound, out;
  free_vars_impl(e, bound, out);
  return out;
}

bool mentions_var(const ExprPtr& e, const std::string& name) {
  return free_vars(e).count(name) > 0;
}

std::string fresh_var(const std::string& base, const std::vector<ExprPtr>& avoid) {
  std::set<std::string> used;
  for (const auto& e : avoid) {
    auto fv = free_vars(e);
    used.insert(fv.begin(), fv.end());
  }
  if (!used.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!used.count(cand)) return cand;
  }
}

ExprPtr subst(const ExprPtr& e, const std::string& name, const ExprPtr& repl) {
  if (!e) return e;
  switch (e->kind) {
    case Expr::Kind::Var:
      return e->name == name ? repl : e;
    case Expr::Kind::Sum:
    case Expr::Kind::Let: {
      ExprPtr src = subst(e->kids[0], name, repl);
      if (e->name == name) {
        if (src == e->kids[0]) return e;
        auto ne = std::make_shared<Expr>(*e);
        ne->kids[0] = src;
        return ne;
      }
      std::string var = e->name;
      ExprPtr body = e->kids[1];
      if (free_vars(repl).count(var)) {
        std::string nv = fresh_var(var, {repl, body});
        body = subst(body, var, mk_var(nv));
        var = nv;
      }
      body = subst(body, name, repl);
      if (src == e->kids[0] && body == e->kids[1] && var == e->name) return e;
      auto ne = std::make_shared<Expr>(*e);
      ne->name = var;
      ne->kids = {src, body};
      return ne;
    }
    default: {
      bool changed = false;
      std::vector<ExprPtr> kids;
      kids.reserve(e->kids.size());
      for (const auto& k : e->kids) {
        ExprPtr nk = subst(k, name, repl);
        changed |= (nk != k);
        kids.push_back(nk);
      }
      if (!changed) return e;
      auto ne = std::make_shared<Expr>(*e);
      ne->kids = std::move(kids);
      return ne;
    }
  }
}

size_t expr_size(const ExprPtr& e) {
  if (!e) return 0;
  size_t n = 1;
  for (const auto& k : e->kids) n += expr_size(k);
  return n;
}

bool contains_kind(const ExprPtr& e, Expr::Kind k) {
  if (!e) return false;
  if (e->kind == k) return true;
  for (const auto& c : e->kids)
    if (contains_kind(c, k)) return true;
  return false;
}

bool is_value_expr(const ExprPtr& e) {
  if (!e) return false;
  return e->kind == Expr::Kind::Const;
}

Value value_of_expr(const ExprPtr& e) {
  if (!is_value_expr(e))
    internal_error("not-a-value", "value_of_expr on a non-value expression");
  return e->cval;
}

} // namespace sdql
