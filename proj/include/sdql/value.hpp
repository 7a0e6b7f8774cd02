#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sdql/types.hpp"

namespace sdql {

// Canonical runtime value. Dictionaries keep their entries sorted by the
// total value order with zero-valued entries removed; every constructor
// that could break this goes through canonicalize.
class Value {
public:
  struct RecordRep {
    std::vector<std::pair<std::string, Value>> fields;
  };
  struct DictRep {
    std::vector<std::pair<Value, Value>> entries;
    bool dense = false;  // dense-array layout annotation; keys are 0..n-1
  };

  using Rep = std::variant<bool, int64_t, double, std::string, RecordRep, DictRep>;

  Value() : kind_(ScalarKind::Bool), rep_(false) {}

  static Value boolean(bool b);
  static Value integer(int64_t n, ScalarKind kind = ScalarKind::Int);
  static Value real(double r, ScalarKind kind = ScalarKind::Real);
  static Value string(std::string s);
  static Value record(std::vector<std::pair<std::string, Value>> fields);
  // Entries in any order; duplicate keys are combined with semi-ring
  // addition and the result is canonicalized.
  static Value dict(std::vector<std::pair<Value, Value>> entries,
                    bool dense = false);
  static Value empty_dict(bool dense = false);

  bool is_bool() const { return std::holds_alternative<bool>(rep_); }
  bool is_int() const { return std::holds_alternative<int64_t>(rep_); }
  bool is_real() const { return std::holds_alternative<double>(rep_); }
  bool is_string() const { return std::holds_alternative<std::string>(rep_); }
  bool is_record() const { return std::holds_alternative<RecordRep>(rep_); }
  bool is_dict() const { return std::holds_alternative<DictRep>(rep_); }
  bool is_scalar() const { return !is_record() && !is_dict(); }

  // Kind tag for numeric scalars (distinguishes nat from int and the tagged
  // semi-ring reals from plain real).
  ScalarKind scalar_kind() const { return kind_; }

  bool as_bool() const { return std::get<bool>(rep_); }
  int64_t as_int() const { return std::get<int64_t>(rep_); }
  double as_real() const { return std::get<double>(rep_); }
  const std::string& as_string() const { return std::get<std::string>(rep_); }
  const std::vector<std::pair<std::string, Value>>& fields() const {
    return std::get<RecordRep>(rep_).fields;
  }
  const std::vector<std::pair<Value, Value>>& entries() const {
    return std::get<DictRep>(rep_).entries;
  }
  bool dense() const { return is_dict() && std::get<DictRep>(rep_).dense; }

  const Value* field(const std::string& name) const;

private:
  ScalarKind kind_;
  Rep rep_;

  friend Value canonicalize(const Value& v);
};

// Total order over canonical values: by structural shape, then scalar kind,
// then payload; reals order by numeric value with ties broken bitwise so
// that ordering agrees with exact bit-level equality.
int compare_values(const Value& a, const Value& b);
bool values_equal(const Value& a, const Value& b);

struct ValueLess {
  bool operator()(const Value& a, const Value& b) const {
    return compare_values(a, b) < 0;
  }
};

// True iff v is the additive identity of its own shape (empty dictionary,
// record of zeros, scalar zero). A value containing a string is never zero.
bool is_zero_value(const Value& v);

// Additive identity of t; errors on string value positions.
Value zero_of(const TypePtr& t);
// Multiplicative identity of a scalar kind.
Value one_of(ScalarKind kind);

// Recursively drops zero-valued dictionary entries and sorts entries by the
// total value order. Idempotent.
Value canonicalize(const Value& v);

// Point-wise semi-ring addition; operands must share a type.
Value add_values(const Value& a, const Value& b);
// Generalized outer-product multiplication following the tensor rules.
Value mul_values(const Value& a, const Value& b);
// Injection along bool <: int <: real.
Value promote_value(const Value& v, ScalarKind target);
// Dictionary lookup; an absent key yields zero_of(value_type). value_type
// may be null when the dictionary is non-empty (the zero is then derived
// from a stored value, which only canonical non-empty dictionaries permit).
Value lookup_value(const Value& dict, const Value& key, const TypePtr& value_type);
Value zero_like(const Value& v);

// Canonical textual form; versioned, bit-exact grammar (see README).
std::string dump_value(const Value& v);

// Checks a value against a type (layout annotations ignored).
bool value_has_type(const Value& v, const TypePtr& t);
// Infers the unique type of a value when possible; empty dictionaries make
// inference fail (returns nullptr somewhere in the tree).
TypePtr infer_value_type(const Value& v);

// Enforces the Table 1 domain restriction for a scalar kind; errors with
// "semiring-domain-violation" when out of range.
void check_scalar_domain(ScalarKind kind, const Value& v);

} // namespace sdql
