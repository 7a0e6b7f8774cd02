#pragma once

// Seeded random generators shared by the property-test suites. The seed
// comes from SDQL_SEED when set, so a failing run can be pinned down and
// replayed exactly.

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "sdql/ast.hpp"
#include "sdql/types.hpp"
#include "sdql/value.hpp"

namespace sdqlgen {

using namespace sdql;

inline uint64_t seed_from_env(uint64_t fallback = 20260826ull) {
  if (const char* s = std::getenv("SDQL_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end && *end == '\0') return v;
  }
  return fallback;
}

struct Rng {
  std::mt19937_64 eng;

  explicit Rng(uint64_t seed) : eng(seed) {}

  int range(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(eng);
  }
  bool chance(double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(eng) < p;
  }
  double real(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng);
  }
  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[(size_t)range(0, (int)xs.size() - 1)];
  }
};

inline const std::vector<ScalarKind>& all_semiring_kinds() {
  static const std::vector<ScalarKind> ks = {
      ScalarKind::Bool,    ScalarKind::Int,    ScalarKind::Real,
      ScalarKind::Nat,     ScalarKind::MinProd, ScalarKind::MaxProd,
      ScalarKind::MinSum,  ScalarKind::MaxSum,  ScalarKind::MaxMin,
  };
  return ks;
}

// A random scalar in the kind's legal domain. Values stay small and
// "grid-like" (multiples of 0.5) so that floating-point + and * stay exact
// and associativity/distributivity checks can demand bit equality.
inline Value random_scalar(Rng& rng, ScalarKind k) {
  switch (k) {
    case ScalarKind::Bool:
      return Value::boolean(rng.chance(0.5));
    case ScalarKind::Int:
      return Value::integer(rng.range(-4, 4));
    case ScalarKind::Nat:
      return Value::integer(rng.range(0, 6), ScalarKind::Nat);
    case ScalarKind::Real:
      return Value::real(rng.range(-6, 6) * 0.5);
    case ScalarKind::MinProd: {
      // (0, inf], min/*; zero is +inf.
      static const double xs[] = {0.5, 1.0, 2.0, 4.0,
                                  std::numeric_limits<double>::infinity()};
      return Value::real(xs[rng.range(0, 4)], k);
    }
    case ScalarKind::MaxProd: {
      // [0, inf), max/*; zero is 0.
      static const double xs[] = {0.0, 0.5, 1.0, 2.0, 4.0};
      return Value::real(xs[rng.range(0, 4)], k);
    }
    case ScalarKind::MinSum: {
      // (-inf, inf], min/+; zero is +inf.
      if (rng.chance(0.15))
        return Value::real(std::numeric_limits<double>::infinity(), k);
      return Value::real(rng.range(-6, 6) * 0.5, k);
    }
    case ScalarKind::MaxSum: {
      // [-inf, inf), max/+; zero is -inf.
      if (rng.chance(0.15))
        return Value::real(-std::numeric_limits<double>::infinity(), k);
      return Value::real(rng.range(-6, 6) * 0.5, k);
    }
    case ScalarKind::MaxMin: {
      // [-inf, inf], max/min; zero -inf, one +inf.
      if (rng.chance(0.1))
        return Value::real(-std::numeric_limits<double>::infinity(), k);
      if (rng.chance(0.1))
        return Value::real(std::numeric_limits<double>::infinity(), k);
      return Value::real(rng.range(-6, 6) * 0.5, k);
    }
    case ScalarKind::String:
      break;
  }
  static const char* words[] = {"a", "b", "c", "dd", "ee"};
  return Value::string(words[rng.range(0, 4)]);
}

// A random semi-ring type of bounded depth (no string value positions).
inline TypePtr random_semiring_type(Rng& rng, int depth) {
  if (depth <= 0 || rng.chance(0.45))
    return scalar_type(rng.pick(all_semiring_kinds()));
  if (rng.chance(0.4)) {
    std::vector<std::pair<std::string, TypePtr>> fs;
    int n = rng.range(1, 2);
    for (int i = 0; i < n; i++)
      fs.emplace_back(std::string(1, char('a' + i)),
                      random_semiring_type(rng, depth - 1));
    return record_type(std::move(fs));
  }
  TypePtr key = rng.chance(0.5) ? scalar_type(ScalarKind::Int)
                                : scalar_type(ScalarKind::String);
  return dict_type(key, random_semiring_type(rng, depth - 1));
}

// A random semi-ring type whose scalar leaves all share one kind, so that
// scalar-against-collection multiplication is defined at the value level.
inline TypePtr random_homogeneous_type(Rng& rng, int depth, ScalarKind leaf) {
  if (depth <= 0 || rng.chance(0.45)) return scalar_type(leaf);
  if (rng.chance(0.4)) {
    std::vector<std::pair<std::string, TypePtr>> fs;
    int n = rng.range(1, 2);
    for (int i = 0; i < n; i++)
      fs.emplace_back(std::string(1, char('a' + i)),
                      random_homogeneous_type(rng, depth - 1, leaf));
    return record_type(std::move(fs));
  }
  TypePtr key = rng.chance(0.5) ? scalar_type(ScalarKind::Int)
                                : scalar_type(ScalarKind::String);
  return dict_type(key, random_homogeneous_type(rng, depth - 1, leaf));
}

// A random key value for a dictionary key type (keys may be strings).
inline Value random_key(Rng& rng, const TypePtr& t);

// A random canonical value of type t.
inline Value random_value(Rng& rng, const TypePtr& t) {
  switch (t->kind) {
    case Type::Kind::Scalar:
      return random_scalar(rng, t->scalar);
    case Type::Kind::Record: {
      std::vector<std::pair<std::string, Value>> fs;
      for (const auto& [n, ft] : t->fields) fs.emplace_back(n, random_value(rng, ft));
      return Value::record(std::move(fs));
    }
    case Type::Kind::Dict: {
      std::vector<std::pair<Value, Value>> es;
      int n = rng.range(0, 3);
      for (int i = 0; i < n; i++)
        es.emplace_back(random_key(rng, t->key), random_value(rng, t->val));
      return Value::dict(std::move(es));
    }
  }
  return Value();
}

inline Value random_key(Rng& rng, const TypePtr& t) {
  if (t->is_scalar(ScalarKind::String)) {
    static const char* ks[] = {"k1", "k2", "k3", "k4"};
    return Value::string(ks[rng.range(0, 3)]);
  }
  if (t->is_scalar(ScalarKind::Int)) return Value::integer(rng.range(0, 5));
  return random_value(rng, t);
}

// ---- well-typed closed term generation ------------------------------------

struct GenBinding {
  std::string name;
  TypePtr type;
};

// A random closed, well-typed expression of type `target`. `fuel` bounds the
// tree size; when it runs out the generator falls back to a constant.
inline ExprPtr random_expr(Rng& rng, std::vector<GenBinding>& scope,
                           const TypePtr& target, int fuel, int* next_var);

inline ExprPtr const_of(Rng& rng, const TypePtr& target) {
  return mk_const(random_value(rng, target), target);
}

inline ExprPtr maybe_var(Rng& rng, std::vector<GenBinding>& scope,
                         const TypePtr& target) {
  std::vector<const GenBinding*> hits;
  for (const auto& b : scope)
    if (types_equal(b.type, target)) hits.push_back(&b);
  if (hits.empty()) return nullptr;
  return mk_var(hits[(size_t)rng.range(0, (int)hits.size() - 1)]->name);
}

inline ExprPtr random_expr(Rng& rng, std::vector<GenBinding>& scope,
                           const TypePtr& target, int fuel, int* next_var) {
  auto recur = [&](const TypePtr& t, int f) {
    return random_expr(rng, scope, t, f, next_var);
  };
  if (fuel <= 1) {
    if (ExprPtr v = rng.chance(0.5) ? maybe_var(rng, scope, target) : nullptr)
      return v;
    return const_of(rng, target);
  }
  // Structure-directed constructors.
  if (target->kind == Type::Kind::Record && rng.chance(0.5)) {
    std::vector<std::string> names;
    std::vector<ExprPtr> kids;
    int per = std::max(1, fuel / std::max<int>(1, (int)target->fields.size()));
    for (const auto& [n, ft] : target->fields) {
      names.push_back(n);
      kids.push_back(recur(ft, per));
    }
    return mk_record(std::move(names), std::move(kids));
  }
  if (target->kind == Type::Kind::Dict && rng.chance(0.5)) {
    int n = rng.range(0, 2);
    if (n == 0) return mk_empty_dict(target->key, target->val);
    std::vector<ExprPtr> kvs;
    for (int i = 0; i < n; i++) {
      kvs.push_back(mk_const(random_key(rng, target->key), target->key));
      kvs.push_back(recur(target->val, fuel / (n + 1)));
    }
    return mk_dict(std::move(kvs));
  }
  switch (rng.range(0, 7)) {
    case 0: {  // let
      TypePtr bt = rng.chance(0.5) ? target : random_semiring_type(rng, 1);
      std::string x = "g" + std::to_string((*next_var)++);
      ExprPtr bound = recur(bt, fuel / 2);
      scope.push_back({x, bt});
      ExprPtr body = recur(target, fuel / 2);
      scope.pop_back();
      return mk_let(x, bound, body);
    }
    case 1: {  // if with both branches
      ExprPtr c = recur(bool_type(), fuel / 3);
      return mk_if(c, recur(target, fuel / 3), recur(target, fuel / 3));
    }
    case 2:  // add
      if (type_has_semiring(target))
        return mk_add(recur(target, fuel / 2), recur(target, fuel / 2));
      break;
    case 3:  // mul (same-kind scalars only; promotion is tested separately)
      if (target->kind == Type::Kind::Scalar &&
          scalar_has_semiring(target->scalar))
        return mk_mul(recur(target, fuel / 2), recur(target, fuel / 2));
      break;
    case 4: {  // sum over a small dictionary
      if (!type_has_semiring(target)) break;
      TypePtr key = rng.chance(0.5) ? int_type() : string_type();
      TypePtr src_t = dict_type(key, target);
      ExprPtr src = recur(src_t, fuel / 2);
      std::string x = "g" + std::to_string((*next_var)++);
      scope.push_back({x, record_type({{"key", key}, {"val", target}})});
      ExprPtr body = recur(target, fuel / 2);
      scope.pop_back();
      return mk_sum(x, src, body);
    }
    case 5: {  // lookup into a dictionary of the target type (the target
      // needs a zero: a miss on a zero-less value type is a runtime error)
      if (!type_has_semiring(target)) break;
      TypePtr key = rng.chance(0.5) ? int_type() : string_type();
      ExprPtr d = recur(dict_type(key, target), fuel - 2);
      return mk_lookup(d, mk_const(random_key(rng, key), key));
    }
    case 6: {  // field projection out of a one-field record
      ExprPtr r = recur(record_type({{"f", target}}), fuel - 1);
      return mk_field(r, "f");
    }
    case 7:  // comparison produces bools
      if (target->is_scalar(ScalarKind::Bool) && rng.chance(0.7)) {
        TypePtr ot = scalar_type(rng.chance(0.5) ? ScalarKind::Int
                                                 : ScalarKind::String);
        CmpOp op = rng.chance(0.5) ? CmpOp::Eq
                                   : (rng.chance(0.5) ? CmpOp::Le : CmpOp::Lt);
        if (ot->is_scalar(ScalarKind::String)) op = CmpOp::Eq;
        return mk_cmp(op, recur(ot, fuel / 2), recur(ot, fuel / 2));
      }
      break;
  }
  if (ExprPtr v = maybe_var(rng, scope, target)) return v;
  return const_of(rng, target);
}

inline ExprPtr random_closed_expr(Rng& rng, int fuel) {
  TypePtr target = random_semiring_type(rng, 2);
  std::vector<GenBinding> scope;
  int next_var = 0;
  return random_expr(rng, scope, target, fuel, &next_var);
}

// ---- rewrite-rule left-hand-side instances --------------------------------

// Small closed {int -> int} dictionary constant.
inline ExprPtr small_int_dict(Rng& rng) {
  std::vector<std::pair<Value, Value>> es;
  int n = rng.range(0, 4);
  for (int i = 0; i < n; i++)
    es.emplace_back(Value::integer(rng.range(0, 6)),
                    Value::integer(rng.range(-3, 3)));
  return mk_const(Value::dict(std::move(es)),
                  dict_type(int_type(), int_type()));
}

// A random arithmetic map over one int-typed variable path.
inline ExprPtr int_map(Rng& rng, ExprPtr arg) {
  switch (rng.range(0, 2)) {
    case 0: return mk_add(std::move(arg), mk_int(rng.range(1, 3)));
    case 1: return mk_mul(std::move(arg), mk_int(rng.range(2, 3)));
    default: return mk_mul(mk_int(rng.range(2, 3)), std::move(arg));
  }
}

// A strict int map (maps 0 to 0), safe on the consumer side of
// value-mapping fusion.
inline ExprPtr strict_int_map(Rng& rng, ExprPtr arg) {
  return mk_mul(std::move(arg), mk_int(rng.range(2, 4)));
}

inline ExprPtr rule_instance_vertical_key(Rng& rng) {
  ExprPtr src = small_int_dict(rng);
  ExprPtr prod = mk_sum("x", src,
                        mk_dict({int_map(rng, field_of("x", "key")),
                                 field_of("x", "val")}));
  ExprPtr cons = mk_sum("z", mk_var("y"),
                        mk_dict({int_map(rng, field_of("z", "key")),
                                 field_of("z", "val")}));
  return mk_let("y", prod, cons);
}

inline ExprPtr rule_instance_vertical_value(Rng& rng) {
  ExprPtr src = small_int_dict(rng);
  ExprPtr prod = mk_sum("x", src,
                        mk_dict({field_of("x", "key"),
                                 int_map(rng, field_of("x", "val"))}));
  ExprPtr cons = mk_sum("z", mk_var("y"),
                        mk_dict({field_of("z", "key"),
                                 strict_int_map(rng, field_of("z", "val"))}));
  return mk_let("y", prod, cons);
}

inline ExprPtr rule_instance_horizontal(Rng& rng) {
  ExprPtr src = small_int_dict(rng);
  ExprPtr s1 = mk_sum("x", src, int_map(rng, field_of("x", "val")));
  ExprPtr s2 = mk_sum("x", src, int_map(rng, field_of("x", "key")));
  ExprPtr body = rng.chance(0.5) ? mk_add(mk_var("y1"), mk_var("y2"))
                                 : mk_mul(mk_var("y1"), mk_var("y2"));
  return mk_let("y1", s1, mk_let("y2", s2, body));
}

inline ExprPtr rule_instance_licm(Rng& rng) {
  ExprPtr src = small_int_dict(rng);
  ExprPtr inv = int_map(rng, mk_int(rng.range(1, 4)));
  ExprPtr body = mk_let("h", inv, mk_mul(mk_var("h"), field_of("x", "val")));
  return mk_sum("x", src, body);
}

inline ExprPtr rule_instance_factorize_left(Rng& rng) {
  ExprPtr src = small_int_dict(rng);
  ExprPtr inv = int_map(rng, mk_int(rng.range(1, 4)));
  return mk_sum("x", src, mk_mul(inv, field_of("x", "val")));
}

inline ExprPtr rule_instance_factorize_right(Rng& rng) {
  ExprPtr src = small_int_dict(rng);
  ExprPtr inv = int_map(rng, mk_int(rng.range(1, 4)));
  return mk_sum("x", src, mk_mul(field_of("x", "val"), inv));
}

inline ExprPtr rule_instance_if_to_mul(Rng& rng) {
  ExprPtr cond = mk_cmp(rng.chance(0.5) ? CmpOp::Le : CmpOp::Lt,
                        mk_int(rng.range(0, 3)), mk_int(rng.range(0, 3)));
  if (rng.chance(0.5))
    return mk_if(cond, int_map(rng, mk_int(rng.range(-2, 3))), mk_int(0));
  return mk_if(cond,
               mk_dict({mk_int(rng.range(0, 3)),
                        int_map(rng, mk_int(rng.range(1, 3)))}),
               mk_empty_dict(int_type(), int_type()));
}

} // namespace sdqlgen
