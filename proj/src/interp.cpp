#include "sdql/interp.hpp"

#include <memory>

#include "sdql/errors.hpp"
#include "sdql/parser.hpp"
#include "sdql/types.hpp"

namespace sdql {

namespace {

Value ring_wrap(ScalarKind ring, const Value& v) {
  Value out = ring == ScalarKind::Nat ? Value::integer(v.as_int(), ScalarKind::Nat)
                                      : Value::real(v.as_real(), ring);
  check_scalar_domain(ring, out);
  return out;
}

Value ring_unwrap(ScalarKind ring, const Value& v) {
  return ring == ScalarKind::Nat ? Value::integer(v.as_int())
                                 : Value::real(v.as_real());
}

Value eval_cmp(CmpOp op, const Value& l, const Value& r) {
  int c = compare_values(l, r);
  switch (op) {
  case CmpOp::Eq: return Value::boolean(c == 0);
  case CmpOp::Ne: return Value::boolean(c != 0);
  case CmpOp::Lt: return Value::boolean(c < 0);
  case CmpOp::Le: return Value::boolean(c <= 0);
  }
  internal_error("unhandled-cmp-op", "eval");
}

Value eval_div(const Value& l, const Value& r) {
  if (r.as_real() == 0.0) runtime_error("division-by-zero", "x / 0.0");
  return Value::real(l.as_real() / r.as_real());
}

// Resolves variable/field/constant chains to a borrowed value without
// copying, so a lookup into a large bound dictionary stays logarithmic.
// Returns nullptr when the expression needs real evaluation. The borrow is
// only valid until the next environment bind, so callers must use it
// before evaluating anything else.
const Value* ev_place(Environment& env, const ExprPtr& e) {
  switch (e->kind) {
  case Expr::Kind::Var:
    return env.lookup(e->name);
  case Expr::Kind::Const:
    return &e->cval;
  case Expr::Kind::Field: {
    const Value* r = ev_place(env, e->kids[0]);
    if (!r || !r->is_record()) return nullptr;
    const Value* f = r->field(e->name);
    if (!f) runtime_error("no-such-field", e->name);
    return f;
  }
  default:
    return nullptr;
  }
}

Value ev(Environment& env, const ExprPtr& e, EvalMetrics* m) {
  switch (e->kind) {
  case Expr::Kind::Var: {
    const Value* v = env.lookup(e->name);
    if (!v) runtime_error("unbound-variable", e->name);
    return *v;
  }
  case Expr::Kind::Const:
    return e->cval;
  case Expr::Kind::Sum: {
    Value src = ev(env, e->kids[0], m);
    const bool innermost = !contains_kind(e->kids[1], Expr::Kind::Sum);
    Value acc;
    bool have_acc = false;
    if (e->body_type) {
      acc = zero_of(e->body_type);
      have_acc = true;
    }
    for (const auto& [k, v] : src.entries()) {
      env.bind(e->name, Value::record({{"key", k}, {"val", v}}));
      Value b = ev(env, e->kids[1], m);
      env.pop();
      if (m && innermost) ++m->loop_iterations;
      acc = have_acc ? add_values(acc, b) : std::move(b);
      have_acc = true;
    }
    if (!have_acc)
      runtime_error("sum-missing-elaboration",
                    "sum over an empty dictionary needs its body type annotation");
    return acc;
  }
  case Expr::Kind::DictLit: {
    std::vector<std::pair<Value, Value>> kvs;
    kvs.reserve(e->kids.size() / 2);
    for (size_t i = 0; i + 1 < e->kids.size(); i += 2) {
      Value k = ev(env, e->kids[i], m);
      Value v = ev(env, e->kids[i + 1], m);
      kvs.emplace_back(std::move(k), std::move(v));
    }
    if (m) ++m->dict_allocations;
    return Value::dict(std::move(kvs), e->dense);
  }
  case Expr::Kind::EmptyDict:
    if (m) ++m->dict_allocations;
    return Value::empty_dict(e->dense);
  case Expr::Kind::Lookup: {
    // Evaluate the key first; the borrowed dictionary place must not
    // outlive any environment rebinding the key's evaluation performs.
    Value k = ev(env, e->kids[1], m);
    if (m) ++m->lookups;
    if (const Value* dp = ev_place(env, e->kids[0]))
      return lookup_value(*dp, k, e->body_type);
    Value d = ev(env, e->kids[0], m);
    return lookup_value(d, k, e->body_type);
  }
  case Expr::Kind::RecordLit: {
    std::vector<std::pair<std::string, Value>> fields;
    fields.reserve(e->kids.size());
    for (size_t i = 0; i < e->kids.size(); ++i)
      fields.emplace_back(e->names[i], ev(env, e->kids[i], m));
    return Value::record(std::move(fields));
  }
  case Expr::Kind::Field: {
    Value r = ev(env, e->kids[0], m);
    const Value* f = r.field(e->name);
    if (!f) runtime_error("no-such-field", e->name);
    return *f;
  }
  case Expr::Kind::Let: {
    Value b = ev(env, e->kids[0], m);
    env.bind(e->name, std::move(b));
    Value out = ev(env, e->kids[1], m);
    env.pop();
    return out;
  }
  case Expr::Kind::If: {
    Value c = ev(env, e->kids[0], m);
    if (c.as_bool()) return ev(env, e->kids[1], m);
    if (e->kids.size() == 3) return ev(env, e->kids[2], m);
    runtime_error("if-missing-elaboration",
                  "if without else needs its default filled in by typechecking");
  }
  case Expr::Kind::Add:
    return add_values(ev(env, e->kids[0], m), ev(env, e->kids[1], m));
  case Expr::Kind::Mul: {
    Value l = ev(env, e->kids[0], m);
    Value r = ev(env, e->kids[1], m);
    if (m && l.is_scalar() && r.is_scalar()) ++m->scalar_mults;
    return mul_values(l, r);
  }
  case Expr::Kind::Promote:
    return promote_value(ev(env, e->kids[0], m), e->prom_to);
  case Expr::Kind::Cmp:
    return eval_cmp(e->cmp, ev(env, e->kids[0], m), ev(env, e->kids[1], m));
  case Expr::Kind::Not:
    return Value::boolean(!ev(env, e->kids[0], m).as_bool());
  case Expr::Kind::Concat: {
    Value l = ev(env, e->kids[0], m);
    Value r = ev(env, e->kids[1], m);
    std::vector<std::pair<std::string, Value>> fields = l.fields();
    for (const auto& f : r.fields()) fields.push_back(f);
    return Value::record(std::move(fields));
  }
  case Expr::Kind::Div:
    return eval_div(ev(env, e->kids[0], m), ev(env, e->kids[1], m));
  case Expr::Kind::ToRing:
    return ring_wrap(e->ring, ev(env, e->kids[0], m));
  case Expr::Kind::FromRing:
    return ring_unwrap(e->ring, ev(env, e->kids[0], m));
  }
  internal_error("unhandled-expr-kind", "eval");
}

// ---- small-step machine ---------------------------------------------------

// The type of a value expression; elaborated terms always allow this to be
// recovered (empty dictionaries carry their ctype).
TypePtr value_expr_type(const ExprPtr& e) {
  TypePtr t = e->ctype ? e->ctype : infer_value_type(e->cval);
  if (!t)
    internal_error("untyped-value-expression",
                   "small-step machine needs elaborated input");
  return t;
}

ExprPtr vconst(Value v, TypePtr t) {
  if (infer_value_type(v)) t = nullptr;  // no annotation when redundant
  return mk_const(std::move(v), std::move(t));
}

// Rebuilds e with kid i replaced.
ExprPtr with_kid(const ExprPtr& e, size_t i, ExprPtr kid) {
  auto copy = std::make_shared<Expr>(*e);
  copy->kids[i] = std::move(kid);
  return copy;
}

// Applies the reduction rule at a node whose evaluated positions are all
// Const; pre: such a rule exists (checked by the caller).
ExprPtr reduce(const ExprPtr& e) {
  auto val = [&](size_t i) -> const Value& { return e->kids[i]->cval; };
  switch (e->kind) {
  case Expr::Kind::Let:
    return subst(e->kids[1], e->name, e->kids[0]);
  case Expr::Kind::If:
    return val(0).as_bool() ? e->kids[1] : e->kids[2];
  case Expr::Kind::Sum: {
    const Value& src = val(0);
    TypePtr st = value_expr_type(e->kids[0]);
    if (src.entries().empty())
      return vconst(zero_of(e->body_type), e->body_type);
    const auto& [k, v] = src.entries().front();
    ExprPtr head = subst(
        e->kids[1], e->name,
        vconst(Value::record({{"key", k}, {"val", v}}),
               record_type({{"key", st->key}, {"val", st->val}})));
    std::vector<std::pair<Value, Value>> rest(src.entries().begin() + 1,
                                              src.entries().end());
    ExprPtr tail = mk_sum(e->name, vconst(Value::dict(std::move(rest)), st),
                          e->kids[1], e->body_type);
    return mk_add(head, tail);
  }
  case Expr::Kind::EmptyDict:
    return vconst(Value::empty_dict(e->dense), dict_type(e->t1, e->t2));
  case Expr::Kind::DictLit: {
    std::vector<std::pair<Value, Value>> kvs;
    for (size_t i = 0; i + 1 < e->kids.size(); i += 2)
      kvs.emplace_back(val(i), val(i + 1));
    TypePtr t = dict_type(value_expr_type(e->kids[0]), value_expr_type(e->kids[1]),
                          e->dense ? DictLayout::DenseArray : DictLayout::Hash);
    return vconst(Value::dict(std::move(kvs), e->dense), t);
  }
  case Expr::Kind::Lookup:
    return vconst(lookup_value(val(0), val(1), e->body_type), e->body_type);
  case Expr::Kind::RecordLit: {
    std::vector<std::pair<std::string, Value>> fields;
    std::vector<std::pair<std::string, TypePtr>> ftypes;
    for (size_t i = 0; i < e->kids.size(); ++i) {
      fields.emplace_back(e->names[i], val(i));
      ftypes.emplace_back(e->names[i], value_expr_type(e->kids[i]));
    }
    return vconst(Value::record(std::move(fields)), record_type(std::move(ftypes)));
  }
  case Expr::Kind::Field: {
    const Value* f = val(0).field(e->name);
    if (!f) runtime_error("no-such-field", e->name);
    TypePtr rec_t = value_expr_type(e->kids[0]);  // keep the type alive
    const TypePtr* ft = record_field(rec_t, e->name);
    return vconst(*f, ft ? *ft : nullptr);
  }
  case Expr::Kind::Add:
    return vconst(add_values(val(0), val(1)), value_expr_type(e->kids[0]));
  case Expr::Kind::Mul: {
    TypePtr t = tensor_type(value_expr_type(e->kids[0]), value_expr_type(e->kids[1]));
    return vconst(mul_values(val(0), val(1)), t);
  }
  case Expr::Kind::Promote:
    return vconst(promote_value(val(0), e->prom_to), scalar_type(e->prom_to));
  case Expr::Kind::Cmp:
    return vconst(eval_cmp(e->cmp, val(0), val(1)), bool_type());
  case Expr::Kind::Not:
    return vconst(Value::boolean(!val(0).as_bool()), bool_type());
  case Expr::Kind::Concat: {
    std::vector<std::pair<std::string, Value>> fields = val(0).fields();
    for (const auto& f : val(1).fields()) fields.push_back(f);
    std::vector<std::pair<std::string, TypePtr>> ftypes =
        value_expr_type(e->kids[0])->fields;
    for (const auto& f : value_expr_type(e->kids[1])->fields) ftypes.push_back(f);
    return vconst(Value::record(std::move(fields)), record_type(std::move(ftypes)));
  }
  case Expr::Kind::Div:
    return vconst(eval_div(val(0), val(1)), real_type());
  case Expr::Kind::ToRing:
    return vconst(ring_wrap(e->ring, val(0)), scalar_type(e->ring));
  case Expr::Kind::FromRing:
    return vconst(ring_unwrap(e->ring, val(0)),
                  scalar_type(e->ring == ScalarKind::Nat ? ScalarKind::Int
                                                         : ScalarKind::Real));
  case Expr::Kind::Var:
  case Expr::Kind::Const:
    break;
  }
  internal_error("not-a-redex", "reduce");
}

// Number of kid positions the evaluation contexts descend into, in order.
// Let / If / Sum evaluate only their first kid before reducing; everything
// else is fully left-to-right.
size_t eval_positions(const Expr& e) {
  switch (e.kind) {
  case Expr::Kind::Let:
  case Expr::Kind::If:
  case Expr::Kind::Sum:
    return 1;
  default:
    return e.kids.size();
  }
}

} // namespace

Value eval(Environment& env, const ExprPtr& e) { return ev(env, e, nullptr); }

Value eval(const ExprPtr& e) {
  Environment env;
  return ev(env, e, nullptr);
}

Value eval_with_metrics(Environment& env, const ExprPtr& e, EvalMetrics& m) {
  return ev(env, e, &m);
}

ExprPtr step(const ExprPtr& e) {
  if (is_value_expr(e)) return nullptr;
  if (e->kind == Expr::Kind::Var)
    runtime_error("unbound-variable", e->name);
  size_t n = eval_positions(*e);
  for (size_t i = 0; i < n; ++i)
    if (!is_value_expr(e->kids[i]))
      return with_kid(e, i, step(e->kids[i]));
  return reduce(e);
}

size_t count_redexes(const ExprPtr& e) {
  if (is_value_expr(e)) return 0;
  if (e->kind == Expr::Kind::Var) return 0;
  size_t n = eval_positions(*e);
  for (size_t i = 0; i < n; ++i)
    if (!is_value_expr(e->kids[i]))
      return count_redexes(e->kids[i]);
  return 1;
}

Value run_small_step(const ExprPtr& e, size_t max_steps,
                     std::vector<std::string>* trace) {
  ExprPtr cur = e;
  for (size_t i = 0; i < max_steps; ++i) {
    ExprPtr next = step(cur);
    if (!next) return cur->cval;
    cur = next;
    if (trace) trace->push_back(pretty(cur));
  }
  runtime_error("step-budget-exhausted",
                "no value after " + std::to_string(max_steps) + " steps");
}

} // namespace sdql
