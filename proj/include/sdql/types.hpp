#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sdql {

// Scalar kinds. bool/int/real form the subtype lattice bool <: int <: real;
// the tagged kinds (nat, min_prod, ...) each stand alone and only combine
// with themselves.
enum class ScalarKind {
  Bool,
  Int,
  Real,
  String,
  Nat,
  MinProd,
  MaxProd,
  MinSum,
  MaxSum,
  MaxMin,
};

const char* scalar_kind_name(ScalarKind k);
std::optional<ScalarKind> scalar_kind_by_name(const std::string& name);

// True for kinds carrying a semi-ring structure (everything except string).
bool scalar_has_semiring(ScalarKind k);

// Subtype relation along bool <: int <: real (reflexive).
bool scalar_subtype(ScalarKind a, ScalarKind b);
// Least upper bound in the lattice, if any.
std::optional<ScalarKind> scalar_join(ScalarKind a, ScalarKind b);

struct Type;
using TypePtr = std::shared_ptr<const Type>;

enum class DictLayout { Hash, DenseArray };

struct Type {
  enum class Kind { Scalar, Record, Dict };

  Kind kind;
  ScalarKind scalar = ScalarKind::Bool;                 // Kind::Scalar
  std::vector<std::pair<std::string, TypePtr>> fields;  // Kind::Record
  TypePtr key, val;                                     // Kind::Dict
  DictLayout layout = DictLayout::Hash;

  bool is_scalar() const { return kind == Kind::Scalar; }
  bool is_record() const { return kind == Kind::Record; }
  bool is_dict() const { return kind == Kind::Dict; }
  bool is_scalar(ScalarKind k) const { return is_scalar() && scalar == k; }
};

TypePtr scalar_type(ScalarKind k);
TypePtr bool_type();
TypePtr int_type();
TypePtr real_type();
TypePtr string_type();
TypePtr record_type(std::vector<std::pair<std::string, TypePtr>> fields);
TypePtr dict_type(TypePtr key, TypePtr val, DictLayout layout = DictLayout::Hash);
// Set of T, i.e. { T -> bool }.
TypePtr set_type(TypePtr elem);
// Array of T, i.e. dense { int -> T }.
TypePtr array_type(TypePtr elem);

// Structural equality. The dense-array layout is an annotation and does not
// participate in type identity.
bool types_equal(const TypePtr& a, const TypePtr& b);

// True if every value position of t carries a semi-ring (strings may appear
// in dictionary keys and nowhere else on the additive path).
bool type_has_semiring(const TypePtr& t);

// The partial tensor operation giving the type of e1 * e2, nullptr when
// undefined. Scalars of distinct kinds combine via promotion to their join.
TypePtr tensor_type(const TypePtr& t1, const TypePtr& t2);

std::string type_to_string(const TypePtr& t);

const TypePtr* record_field(const TypePtr& rec, const std::string& name);

} // namespace sdql
