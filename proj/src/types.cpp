#include "sdql/types.hpp"

#include <array>

namespace sdql {

const char* scalar_kind_name(ScalarKind k) {
  switch (k) {
    case ScalarKind::Bool: return "bool";
    case ScalarKind::Int: return "int";
    case ScalarKind::Real: return "real";
    case ScalarKind::String: return "string";
    case ScalarKind::Nat: return "nat";
    case ScalarKind::MinProd: return "min_prod";
    case ScalarKind::MaxProd: return "max_prod";
    case ScalarKind::MinSum: return "min_sum";
    case ScalarKind::MaxSum: return "max_sum";
    case ScalarKind::MaxMin: return "max_min";
  }
  return "?";
}

std::optional<ScalarKind> scalar_kind_by_name(const std::string& name) {
  static const std::array<ScalarKind, 10> kinds = {
      ScalarKind::Bool, ScalarKind::Int, ScalarKind::Real, ScalarKind::String,
      ScalarKind::Nat, ScalarKind::MinProd, ScalarKind::MaxProd,
      ScalarKind::MinSum, ScalarKind::MaxSum, ScalarKind::MaxMin};
  for (ScalarKind k : kinds)
    if (name == scalar_kind_name(k)) return k;
  return std::nullopt;
}

bool scalar_has_semiring(ScalarKind k) { return k != ScalarKind::String; }

static int lattice_rank(ScalarKind k) {
  switch (k) {
    case ScalarKind::Bool: return 0;
    case ScalarKind::Int: return 1;
    case ScalarKind::Real: return 2;
    default: return -1;
  }
}

bool scalar_subtype(ScalarKind a, ScalarKind b) {
  if (a == b) return true;
  int ra = lattice_rank(a), rb = lattice_rank(b);
  return ra >= 0 && rb >= 0 && ra <= rb;
}

std::optional<ScalarKind> scalar_join(ScalarKind a, ScalarKind b) {
  if (a == b) return a;
  int ra = lattice_rank(a), rb = lattice_rank(b);
  if (ra < 0 || rb < 0) return std::nullopt;
  return ra > rb ? a : b;
}

TypePtr scalar_type(ScalarKind k) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Scalar;
  t->scalar = k;
  return t;
}

TypePtr bool_type() {
  static TypePtr t = scalar_type(ScalarKind::Bool);
  return t;
}
TypePtr int_type() {
  static TypePtr t = scalar_type(ScalarKind::Int);
  return t;
}
TypePtr real_type() {
  static TypePtr t = scalar_type(ScalarKind::Real);
  return t;
}
TypePtr string_type() {
  static TypePtr t = scalar_type(ScalarKind::String);
  return t;
}

TypePtr record_type(std::vector<std::pair<std::string, TypePtr>> fields) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Record;
  t->fields = std::move(fields);
  return t;
}

TypePtr dict_type(TypePtr key, TypePtr val, DictLayout layout) {
  auto t = std::make_shared<Type>();
  t->kind = Type::Kind::Dict;
  t->key = std::move(key);
  t->val = std::move(val);
  t->layout = layout;
  return t;
}

TypePtr set_type(TypePtr elem) { return dict_type(std::move(elem), bool_type()); }

TypePtr array_type(TypePtr elem) {
  return dict_type(int_type(), std::move(elem), DictLayout::DenseArray);
}

bool types_equal(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Type::Kind::Scalar:
      return a->scalar == b->scalar;
    case Type::Kind::Record: {
      if (a->fields.size() != b->fields.size()) return false;
      for (size_t i = 0; i < a->fields.size(); ++i) {
        if (a->fields[i].first != b->fields[i].first) return false;
        if (!types_equal(a->fields[i].second, b->fields[i].second)) return false;
      }
      return true;
    }
    case Type::Kind::Dict:
      return types_equal(a->key, b->key) && types_equal(a->val, b->val);
  }
  return false;
}

bool type_has_semiring(const TypePtr& t) {
  if (!t) return false;
  switch (t->kind) {
    case Type::Kind::Scalar:
      return scalar_has_semiring(t->scalar);
    case Type::Kind::Record:
      for (const auto& [name, ft] : t->fields)
        if (!type_has_semiring(ft)) return false;
      return true;
    case Type::Kind::Dict:
      // Keys only need equality, which every type has.
      return type_has_semiring(t->val);
  }
  return false;
}

TypePtr tensor_type(const TypePtr& t1, const TypePtr& t2) {
  if (!t1 || !t2) return nullptr;
  // Dictionary and record on the left map their value positions.
  if (t1->is_dict()) {
    TypePtr inner = tensor_type(t1->val, t2);
    if (!inner) return nullptr;
    return dict_type(t1->key, inner, t1->layout);
  }
  if (t1->is_record()) {
    std::vector<std::pair<std::string, TypePtr>> fields;
    fields.reserve(t1->fields.size());
    for (const auto& [name, ft] : t1->fields) {
      TypePtr inner = tensor_type(ft, t2);
      if (!inner) return nullptr;
      fields.emplace_back(name, inner);
    }
    return record_type(std::move(fields));
  }
  // Scalar on the left.
  if (!scalar_has_semiring(t1->scalar)) return nullptr;
  if (t2->is_dict()) {
    TypePtr inner = tensor_type(t1, t2->val);
    if (!inner) return nullptr;
    return dict_type(t2->key, inner, t2->layout);
  }
  if (t2->is_record()) {
    std::vector<std::pair<std::string, TypePtr>> fields;
    fields.reserve(t2->fields.size());
    for (const auto& [name, ft] : t2->fields) {
      TypePtr inner = tensor_type(t1, ft);
      if (!inner) return nullptr;
      fields.emplace_back(name, inner);
    }
    return record_type(std::move(fields));
  }
  if (!scalar_has_semiring(t2->scalar)) return nullptr;
  auto j = scalar_join(t1->scalar, t2->scalar);
  if (!j) return nullptr;
  return scalar_type(*j);
}

std::string type_to_string(const TypePtr& t) {
  if (!t) return "?";
  switch (t->kind) {
    case Type::Kind::Scalar:
      return scalar_kind_name(t->scalar);
    case Type::Kind::Record: {
      std::string s = "<";
      bool first = true;
      for (const auto& [name, ft] : t->fields) {
        if (!first) s += ", ";
        first = false;
        s += name + ": " + type_to_string(ft);
      }
      return s + ">";
    }
    case Type::Kind::Dict:
      if (t->layout == DictLayout::DenseArray &&
          t->key->is_scalar(ScalarKind::Int))
        return "[|" + type_to_string(t->val) + "|]";
      return "{" + type_to_string(t->key) + " -> " + type_to_string(t->val) + "}";
  }
  return "?";
}

const TypePtr* record_field(const TypePtr& rec, const std::string& name) {
  if (!rec || !rec->is_record()) return nullptr;
  for (const auto& f : rec->fields)
    if (f.first == name) return &f.second;
  return nullptr;
}

} // namespace sdql
