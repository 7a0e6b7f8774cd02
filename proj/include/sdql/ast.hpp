#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "sdql/types.hpp"
#include "sdql/value.hpp"

namespace sdql {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class CmpOp { Eq, Ne, Lt, Le };

const char* cmp_op_name(CmpOp op);

struct Expr {
  enum class Kind {
    Sum,        // sum(name in kids[0]) kids[1]; body_type set by elaboration
    DictLit,    // kids = k0, v0, k1, v1, ...
    EmptyDict,  // t1 -> t2; both may be null until elaboration
    Lookup,     // kids[0](kids[1])
    RecordLit,  // names[i] = kids[i]
    Field,      // kids[0].name
    Let,        // let name = kids[0] in kids[1]
    Var,        // name
    If,         // kids = {cond, then} or {cond, then, else}
    Add,
    Mul,
    Promote,    // promote_{prom_from, prom_to}(kids[0])
    Const,      // cval (ctype when the value alone does not determine it)
    Cmp,        // kids[0] op kids[1]
    Not,        // !kids[0]
    Concat,     // concat(kids[0], kids[1]) on records
    Div,        // kids[0] / kids[1], real division
    ToRing,     // wrap a real into the tagged semi-ring `ring`
    FromRing,   // unwrap a tagged semi-ring scalar back to real
  };

  Kind kind;
  std::string name;
  std::vector<ExprPtr> kids;
  std::vector<std::string> names;
  TypePtr t1, t2;            // EmptyDict key/value types
  TypePtr body_type;         // elaboration annotation: Sum body type, and the
                             // dictionary value type on Lookup nodes
  bool dense = false;        // DictLit / EmptyDict dense-array layout
  Value cval;
  TypePtr ctype;
  CmpOp cmp = CmpOp::Eq;
  ScalarKind prom_from = ScalarKind::Bool, prom_to = ScalarKind::Bool;
  ScalarKind ring = ScalarKind::Real;
  int line = 0, col = 0;
};

ExprPtr mk_sum(std::string var, ExprPtr src, ExprPtr body, TypePtr body_type = nullptr);
ExprPtr mk_dict(std::vector<ExprPtr> kvs, bool dense = false);
ExprPtr mk_empty_dict(TypePtr key, TypePtr val, bool dense = false);
ExprPtr mk_lookup(ExprPtr dict, ExprPtr key);
ExprPtr mk_record(std::vector<std::string> names, std::vector<ExprPtr> kids);
ExprPtr mk_field(ExprPtr rec, std::string name);
ExprPtr mk_let(std::string var, ExprPtr bound, ExprPtr body);
ExprPtr mk_var(std::string name);
ExprPtr mk_if(ExprPtr cond, ExprPtr then_e, ExprPtr else_e = nullptr);
ExprPtr mk_add(ExprPtr l, ExprPtr r);
ExprPtr mk_mul(ExprPtr l, ExprPtr r);
ExprPtr mk_promote(ScalarKind from, ScalarKind to, ExprPtr e);
ExprPtr mk_const(Value v, TypePtr t = nullptr);
ExprPtr mk_int(int64_t n);
ExprPtr mk_real(double r);
ExprPtr mk_bool(bool b);
ExprPtr mk_string(std::string s);
ExprPtr mk_cmp(CmpOp op, ExprPtr l, ExprPtr r);
ExprPtr mk_not(ExprPtr e);
ExprPtr mk_concat(ExprPtr l, ExprPtr r);
ExprPtr mk_div(ExprPtr l, ExprPtr r);
ExprPtr mk_to_ring(ScalarKind ring, ExprPtr e);
ExprPtr mk_from_ring(ScalarKind ring, ExprPtr e);

// Convenience for building x.key / x.val style accessors.
ExprPtr field_of(const std::string& var, const std::string& f);
ExprPtr field_of(const std::string& var, const std::string& f1, const std::string& f2);

// Structural equality (bound names compared literally).
bool exprs_equal(const ExprPtr& a, const ExprPtr& b);
// Equality up to renaming of bound variables.
bool alpha_equal(const ExprPtr& a, const ExprPtr& b);

std::set<std::string> free_vars(const ExprPtr& e);
bool mentions_var(const ExprPtr& e, const std::string& name);

// Capture-avoiding substitution of `name` by `repl`.
ExprPtr subst(const ExprPtr& e, const std::string& name, const ExprPtr& repl);

// A variable name not free in any of the given expressions.
std::string fresh_var(const std::string& base, const std::vector<ExprPtr>& avoid);

size_t expr_size(const ExprPtr& e);
bool contains_kind(const ExprPtr& e, Expr::Kind k);

// True iff e matches the value grammar of the small-step machine (a Const,
// or a literal structure all of whose parts are values).
bool is_value_expr(const ExprPtr& e);
// Converts a value expression to its Value; pre: is_value_expr(e).
Value value_of_expr(const ExprPtr& e);

} // namespace sdql
