#include "sdql/typecheck.hpp"

#include <memory>

#include "sdql/errors.hpp"
#include "sdql/value.hpp"

namespace sdql {

namespace {

ExprPtr at(ExprPtr e, const Expr& src) {
  if (e->line == src.line && e->col == src.col) return e;
  auto copy = std::make_shared<Expr>(*e);
  copy->line = src.line;
  copy->col = src.col;
  return copy;
}

[[noreturn]] void fail(const Expr& e, const std::string& code, const std::string& msg) {
  type_error(code, msg, e.line, e.col);
}

// Wraps a scalar expression in a promotion when its kind is below `target`
// in the bool <: int <: real lattice.
ExprPtr coerce_scalar(const ExprPtr& e, ScalarKind from, ScalarKind target) {
  if (from == target) return e;
  return at(mk_promote(from, target, e), *e);
}

Typed tc(TypeEnv& env, const ExprPtr& e, const TypePtr& expected);

Typed tc_sum(TypeEnv& env, const ExprPtr& e, const TypePtr& expected) {
  Typed src = tc(env, e->kids[0], nullptr);
  if (!src.type->is_dict())
    fail(*e, "sum-source-not-dictionary",
         "sum ranges over a dictionary, got " + type_to_string(src.type));
  env.bind(e->name, record_type({{"key", src.type->key}, {"val", src.type->val}}));
  Typed body = tc(env, e->kids[1], expected);
  env.pop();
  if (!type_has_semiring(body.type))
    fail(*e, "sum-body-not-semiring",
         "sum body has no additive structure: " + type_to_string(body.type));
  return {at(mk_sum(e->name, src.expr, body.expr, body.type), *e), body.type};
}

Typed tc_dict(TypeEnv& env, const ExprPtr& e, const TypePtr& expected) {
  TypePtr ek = nullptr, ev = nullptr;
  if (expected && expected->is_dict()) {
    ek = expected->key;
    ev = expected->val;
  }
  TypePtr kt = nullptr, vt = nullptr;
  std::vector<ExprPtr> kvs;
  kvs.reserve(e->kids.size());
  for (size_t i = 0; i + 1 < e->kids.size(); i += 2) {
    Typed k = tc(env, e->kids[i], ek ? ek : kt);
    Typed v = tc(env, e->kids[i + 1], ev ? ev : vt);
    if (!kt) {
      kt = k.type;
      vt = v.type;
    } else {
      if (!types_equal(kt, k.type))
        fail(*e->kids[i], "dict-key-type-mismatch",
             "expected key of type " + type_to_string(kt) + ", got " +
                 type_to_string(k.type));
      if (!types_equal(vt, v.type))
        fail(*e->kids[i + 1], "dict-value-type-mismatch",
             "expected value of type " + type_to_string(vt) + ", got " +
                 type_to_string(v.type));
    }
    kvs.push_back(k.expr);
    kvs.push_back(v.expr);
  }
  TypePtr t = dict_type(kt, vt, e->dense ? DictLayout::DenseArray : DictLayout::Hash);
  return {at(mk_dict(std::move(kvs), e->dense), *e), t};
}

Typed tc_const(TypeEnv& env, const ExprPtr& e, const TypePtr& expected) {
  (void)env;
  if (e->ctype) {
    if (!value_has_type(e->cval, e->ctype))
      fail(*e, "constant-type-mismatch",
           "literal does not inhabit " + type_to_string(e->ctype));
    return {e, e->ctype};
  }
  TypePtr t = infer_value_type(e->cval);
  if (t) return {e, t};
  if (expected && value_has_type(e->cval, expected))
    return {at(mk_const(e->cval, expected), *e), expected};
  fail(*e, "cannot-infer-constant-type",
       "literal contains an empty dictionary of unknown type");
}

Typed tc_if(TypeEnv& env, const ExprPtr& e, const TypePtr& expected) {
  Typed c = tc(env, e->kids[0], bool_type());
  if (!c.type->is_scalar(ScalarKind::Bool))
    fail(*e->kids[0], "if-condition-not-bool",
         "condition has type " + type_to_string(c.type));
  Typed t = tc(env, e->kids[1], expected);
  if (e->kids.size() == 2) {
    if (!type_has_semiring(t.type))
      fail(*e, "if-default-not-semiring",
           "if without else needs an additive result type, got " +
               type_to_string(t.type));
    ExprPtr zero = mk_const(zero_of(t.type), t.type);
    return {at(mk_if(c.expr, t.expr, zero), *e), t.type};
  }
  Typed f = tc(env, e->kids[2], t.type);
  if (!types_equal(t.type, f.type))
    fail(*e, "if-branch-type-mismatch",
         type_to_string(t.type) + " vs " + type_to_string(f.type));
  return {at(mk_if(c.expr, t.expr, f.expr), *e), t.type};
}

Typed tc_mul(TypeEnv& env, const ExprPtr& e) {
  Typed l = tc(env, e->kids[0], nullptr);
  Typed r = tc(env, e->kids[1], nullptr);
  TypePtr t = tensor_type(l.type, r.type);
  if (!t)
    fail(*e, "mul-undefined-tensor-type",
         type_to_string(l.type) + " * " + type_to_string(r.type));
  ExprPtr le = l.expr, re = r.expr;
  if (l.type->is_scalar() && r.type->is_scalar() && t->is_scalar()) {
    le = coerce_scalar(le, l.type->scalar, t->scalar);
    re = coerce_scalar(re, r.type->scalar, t->scalar);
  }
  return {at(mk_mul(le, re), *e), t};
}

Typed tc_div(TypeEnv& env, const ExprPtr& e) {
  Typed l = tc(env, e->kids[0], nullptr);
  Typed r = tc(env, e->kids[1], nullptr);
  for (const Typed* side : {&l, &r})
    if (!side->type->is_scalar() || !scalar_subtype(side->type->scalar, ScalarKind::Real))
      fail(*e, "div-operand-not-numeric",
           "division needs numeric operands, got " + type_to_string(side->type));
  ExprPtr le = coerce_scalar(l.expr, l.type->scalar, ScalarKind::Real);
  ExprPtr re = coerce_scalar(r.expr, r.type->scalar, ScalarKind::Real);
  return {at(mk_div(le, re), *e), real_type()};
}

Typed tc(TypeEnv& env, const ExprPtr& e, const TypePtr& expected) {
  switch (e->kind) {
  case Expr::Kind::Var: {
    const TypePtr* t = env.lookup(e->name);
    if (!t) fail(*e, "unbound-variable", e->name);
    return {e, *t};
  }
  case Expr::Kind::Const:
    return tc_const(env, e, expected);
  case Expr::Kind::Sum:
    return tc_sum(env, e, expected);
  case Expr::Kind::DictLit:
    return tc_dict(env, e, expected);
  case Expr::Kind::EmptyDict: {
    TypePtr k = e->t1, v = e->t2;
    if ((!k || !v) && expected && expected->is_dict()) {
      if (!k) k = expected->key;
      if (!v) v = expected->val;
    }
    if (!k || !v)
      fail(*e, "cannot-infer-empty-dict-type",
           "annotate the empty dictionary, e.g. { }_{int, real}");
    TypePtr t = dict_type(k, v, e->dense ? DictLayout::DenseArray : DictLayout::Hash);
    return {at(mk_empty_dict(k, v, e->dense), *e), t};
  }
  case Expr::Kind::Lookup: {
    Typed d = tc(env, e->kids[0], nullptr);
    if (!d.type->is_dict())
      fail(*e, "lookup-on-non-dictionary", "got " + type_to_string(d.type));
    Typed k = tc(env, e->kids[1], d.type->key);
    if (!types_equal(k.type, d.type->key))
      fail(*e, "lookup-key-type-mismatch",
           "expected " + type_to_string(d.type->key) + ", got " +
               type_to_string(k.type));
    auto node = std::make_shared<Expr>(*at(mk_lookup(d.expr, k.expr), *e));
    node->body_type = d.type->val;
    return {node, d.type->val};
  }
  case Expr::Kind::RecordLit: {
    std::vector<std::pair<std::string, TypePtr>> fields;
    std::vector<ExprPtr> kids;
    for (size_t i = 0; i < e->kids.size(); ++i) {
      for (size_t j = 0; j < i; ++j)
        if (e->names[j] == e->names[i])
          fail(*e, "duplicate-record-field", e->names[i]);
      const TypePtr* ef = expected && expected->is_record()
                              ? record_field(expected, e->names[i])
                              : nullptr;
      Typed f = tc(env, e->kids[i], ef ? *ef : nullptr);
      fields.emplace_back(e->names[i], f.type);
      kids.push_back(f.expr);
    }
    return {at(mk_record(e->names, std::move(kids)), *e), record_type(std::move(fields))};
  }
  case Expr::Kind::Field: {
    Typed r = tc(env, e->kids[0], nullptr);
    if (!r.type->is_record())
      fail(*e, "field-on-non-record", "got " + type_to_string(r.type));
    const TypePtr* ft = record_field(r.type, e->name);
    if (!ft)
      fail(*e, "no-such-field",
           e->name + " in " + type_to_string(r.type));
    return {at(mk_field(r.expr, e->name), *e), *ft};
  }
  case Expr::Kind::Let: {
    Typed b = tc(env, e->kids[0], nullptr);
    env.bind(e->name, b.type);
    Typed body = tc(env, e->kids[1], expected);
    env.pop();
    return {at(mk_let(e->name, b.expr, body.expr), *e), body.type};
  }
  case Expr::Kind::If:
    return tc_if(env, e, expected);
  case Expr::Kind::Add: {
    Typed l = tc(env, e->kids[0], expected);
    Typed r = tc(env, e->kids[1], l.type);
    if (!types_equal(l.type, r.type))
      fail(*e, "add-type-mismatch",
           type_to_string(l.type) + " vs " + type_to_string(r.type));
    if (!type_has_semiring(l.type))
      fail(*e, "add-not-semiring", "no additive structure: " + type_to_string(l.type));
    return {at(mk_add(l.expr, r.expr), *e), l.type};
  }
  case Expr::Kind::Mul:
    return tc_mul(env, e);
  case Expr::Kind::Promote: {
    Typed v = tc(env, e->kids[0], nullptr);
    if (!v.type->is_scalar(e->prom_from) ||
        !scalar_subtype(e->prom_from, e->prom_to))
      fail(*e, "invalid-promotion",
           "promote_{" + std::string(scalar_kind_name(e->prom_from)) + ", " +
               scalar_kind_name(e->prom_to) + "} applied to " +
               type_to_string(v.type));
    return {at(mk_promote(e->prom_from, e->prom_to, v.expr), *e),
            scalar_type(e->prom_to)};
  }
  case Expr::Kind::Cmp: {
    Typed l = tc(env, e->kids[0], nullptr);
    Typed r = tc(env, e->kids[1], l.type);
    if (!l.type->is_scalar() || !types_equal(l.type, r.type))
      fail(*e, "cmp-operand-mismatch",
           type_to_string(l.type) + " vs " + type_to_string(r.type));
    return {at(mk_cmp(e->cmp, l.expr, r.expr), *e), bool_type()};
  }
  case Expr::Kind::Not: {
    Typed v = tc(env, e->kids[0], bool_type());
    if (!v.type->is_scalar(ScalarKind::Bool))
      fail(*e, "not-operand-not-bool", "got " + type_to_string(v.type));
    return {at(mk_not(v.expr), *e), bool_type()};
  }
  case Expr::Kind::Concat: {
    Typed l = tc(env, e->kids[0], nullptr);
    Typed r = tc(env, e->kids[1], nullptr);
    if (!l.type->is_record() || !r.type->is_record())
      fail(*e, "concat-on-non-record",
           type_to_string(l.type) + " vs " + type_to_string(r.type));
    std::vector<std::pair<std::string, TypePtr>> fields = l.type->fields;
    for (const auto& f : r.type->fields) {
      if (record_field(l.type, f.first))
        fail(*e, "concat-duplicate-field", f.first);
      fields.push_back(f);
    }
    return {at(mk_concat(l.expr, r.expr), *e), record_type(std::move(fields))};
  }
  case Expr::Kind::Div:
    return tc_div(env, e);
  case Expr::Kind::ToRing: {
    ScalarKind carrier =
        e->ring == ScalarKind::Nat ? ScalarKind::Int : ScalarKind::Real;
    Typed v = tc(env, e->kids[0], scalar_type(carrier));
    if (!v.type->is_scalar(carrier))
      fail(*e, "ring-cast-operand-mismatch",
           std::string("to_") + scalar_kind_name(e->ring) + " expects " +
               scalar_kind_name(carrier) + ", got " + type_to_string(v.type));
    return {at(mk_to_ring(e->ring, v.expr), *e), scalar_type(e->ring)};
  }
  case Expr::Kind::FromRing: {
    Typed v = tc(env, e->kids[0], scalar_type(e->ring));
    if (!v.type->is_scalar(e->ring))
      fail(*e, "ring-cast-operand-mismatch",
           std::string("from_") + scalar_kind_name(e->ring) + " expects " +
               scalar_kind_name(e->ring) + ", got " + type_to_string(v.type));
    ScalarKind carrier =
        e->ring == ScalarKind::Nat ? ScalarKind::Int : ScalarKind::Real;
    return {at(mk_from_ring(e->ring, v.expr), *e), scalar_type(carrier)};
  }
  }
  internal_error("unhandled-expr-kind", "typecheck");
}

} // namespace

Typed typecheck(TypeEnv& env, const ExprPtr& e) { return tc(env, e, nullptr); }

Typed typecheck(const ExprPtr& e) {
  TypeEnv env;
  return tc(env, e, nullptr);
}

} // namespace sdql
