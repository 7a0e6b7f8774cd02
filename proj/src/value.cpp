#include "sdql/value.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "sdql/errors.hpp"

namespace sdql {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int rep_rank(const Value& v) {
  if (v.is_bool()) return 0;
  if (v.is_int()) return 1;
  if (v.is_real()) return 2;
  if (v.is_string()) return 3;
  if (v.is_record()) return 4;
  return 5;
}

int cmp3(int64_t a, int64_t b) { return a < b ? -1 : (a > b ? 1 : 0); }

int compare_reals(double a, double b) {
  if (a < b) return -1;
  if (a > b) return 1;
  // Tie-break bit patterns that compare numerically equal (e.g. -0.0 vs
  // 0.0) so the order is total and agrees with bitwise equality.
  uint64_t ba = std::bit_cast<uint64_t>(a), bb = std::bit_cast<uint64_t>(b);
  return ba < bb ? -1 : (ba > bb ? 1 : 0);
}

} // namespace

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = ScalarKind::Bool;
  v.rep_ = b;
  return v;
}

Value Value::integer(int64_t n, ScalarKind kind) {
  if (kind == ScalarKind::Nat && n < 0)
    runtime_error("semiring-domain-violation", "nat value must be non-negative");
  Value v;
  v.kind_ = kind;
  v.rep_ = n;
  return v;
}

Value Value::real(double r, ScalarKind kind) {
  Value v;
  if (r == 0.0) r = 0.0;  // normalize -0.0 so bitwise ordering stays sane
  v.kind_ = kind;
  v.rep_ = r;
  check_scalar_domain(kind, v);
  return v;
}

Value Value::string(std::string s) {
  Value v;
  v.kind_ = ScalarKind::String;
  v.rep_ = std::move(s);
  return v;
}

Value Value::record(std::vector<std::pair<std::string, Value>> fields) {
  Value v;
  RecordRep r;
  r.fields = std::move(fields);
  v.rep_ = std::move(r);
  return v;
}

Value Value::dict(std::vector<std::pair<Value, Value>> entries, bool dense) {
  if (dense) {
    // The layout annotation presumes non-negative integer keys; entries that
    // canonicalization drops stay implicit zeros of the array, so gaps in
    // 0..n-1 are legitimate. Layout is semantically transparent, so a key
    // outside the array shape quietly drops the annotation instead of
    // failing.
    for (const auto& e : entries)
      if (!e.first.is_int() || e.first.scalar_kind() != ScalarKind::Int ||
          e.first.as_int() < 0) {
        dense = false;
        break;
      }
  }
  Value raw;
  DictRep d;
  d.entries = std::move(entries);
  d.dense = dense;
  raw.rep_ = std::move(d);
  return canonicalize(raw);
}

Value Value::empty_dict(bool dense) {
  Value v;
  DictRep d;
  d.dense = dense;
  v.rep_ = std::move(d);
  return v;
}

const Value* Value::field(const std::string& name) const {
  for (const auto& f : fields())
    if (f.first == name) return &f.second;
  return nullptr;
}

int compare_values(const Value& a, const Value& b) {
  int ra = rep_rank(a), rb = rep_rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (a.is_scalar() && a.scalar_kind() != b.scalar_kind())
    return static_cast<int>(a.scalar_kind()) < static_cast<int>(b.scalar_kind())
               ? -1 : 1;
  if (a.is_bool()) return cmp3(a.as_bool(), b.as_bool());
  if (a.is_int()) return cmp3(a.as_int(), b.as_int());
  if (a.is_real()) return compare_reals(a.as_real(), b.as_real());
  if (a.is_string()) return a.as_string().compare(b.as_string());
  if (a.is_record()) {
    const auto& fa = a.fields();
    const auto& fb = b.fields();
    size_t n = std::min(fa.size(), fb.size());
    for (size_t i = 0; i < n; ++i) {
      if (int c = fa[i].first.compare(fb[i].first)) return c;
      if (int c = compare_values(fa[i].second, fb[i].second)) return c;
    }
    return cmp3(fa.size(), fb.size());
  }
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  size_t n = std::min(ea.size(), eb.size());
  for (size_t i = 0; i < n; ++i) {
    if (int c = compare_values(ea[i].first, eb[i].first)) return c;
    if (int c = compare_values(ea[i].second, eb[i].second)) return c;
  }
  return cmp3(ea.size(), eb.size());
}

bool values_equal(const Value& a, const Value& b) {
  return compare_values(canonicalize(a), canonicalize(b)) == 0;
}

bool is_zero_value(const Value& v) {
  if (v.is_dict()) return v.entries().empty();
  if (v.is_record()) {
    for (const auto& f : v.fields())
      if (!is_zero_value(f.second)) return false;
    return true;
  }
  if (v.is_string()) return false;
  if (v.is_bool()) return !v.as_bool();
  if (v.is_int()) return v.as_int() == 0;
  switch (v.scalar_kind()) {
    case ScalarKind::Real: return v.as_real() == 0.0;
    case ScalarKind::MinProd:
    case ScalarKind::MinSum: return v.as_real() == kInf;
    case ScalarKind::MaxProd: return v.as_real() == 0.0;
    case ScalarKind::MaxSum:
    case ScalarKind::MaxMin: return v.as_real() == -kInf;
    default: return false;
  }
}

Value zero_of(const TypePtr& t) {
  if (!t) internal_error("zero-of-null-type", "zero_of called on null type");
  switch (t->kind) {
    case Type::Kind::Dict:
      return Value::empty_dict(t->layout == DictLayout::DenseArray);
    case Type::Kind::Record: {
      std::vector<std::pair<std::string, Value>> fields;
      fields.reserve(t->fields.size());
      for (const auto& [name, ft] : t->fields)
        fields.emplace_back(name, zero_of(ft));
      return Value::record(std::move(fields));
    }
    case Type::Kind::Scalar:
      switch (t->scalar) {
        case ScalarKind::Bool: return Value::boolean(false);
        case ScalarKind::Int: return Value::integer(0);
        case ScalarKind::Nat: return Value::integer(0, ScalarKind::Nat);
        case ScalarKind::Real: return Value::real(0.0);
        case ScalarKind::MinProd: return Value::real(kInf, ScalarKind::MinProd);
        case ScalarKind::MaxProd: return Value::real(0.0, ScalarKind::MaxProd);
        case ScalarKind::MinSum: return Value::real(kInf, ScalarKind::MinSum);
        case ScalarKind::MaxSum: return Value::real(-kInf, ScalarKind::MaxSum);
        case ScalarKind::MaxMin: return Value::real(-kInf, ScalarKind::MaxMin);
        case ScalarKind::String:
          runtime_error("no-semiring-for-string-value",
                        "string has no additive identity");
      }
  }
  internal_error("zero-of-bad-type", "unreachable");
}

Value one_of(ScalarKind kind) {
  switch (kind) {
    case ScalarKind::Bool: return Value::boolean(true);
    case ScalarKind::Int: return Value::integer(1);
    case ScalarKind::Nat: return Value::integer(1, ScalarKind::Nat);
    case ScalarKind::Real: return Value::real(1.0);
    case ScalarKind::MinProd: return Value::real(1.0, ScalarKind::MinProd);
    case ScalarKind::MaxProd: return Value::real(1.0, ScalarKind::MaxProd);
    case ScalarKind::MinSum: return Value::real(0.0, ScalarKind::MinSum);
    case ScalarKind::MaxSum: return Value::real(0.0, ScalarKind::MaxSum);
    case ScalarKind::MaxMin: return Value::real(kInf, ScalarKind::MaxMin);
    case ScalarKind::String:
      runtime_error("no-semiring-for-string-value",
                    "string has no multiplicative identity");
  }
  internal_error("one-of-bad-kind", "unreachable");
}

void check_scalar_domain(ScalarKind kind, const Value& v) {
  if (kind == ScalarKind::Nat && v.is_int() && v.as_int() < 0)
    runtime_error("semiring-domain-violation",
                  "nat value out of domain: " + std::to_string(v.as_int()));
  if (!v.is_real()) return;
  double r = v.as_real();
  bool ok = true;
  switch (kind) {
    case ScalarKind::MinProd: ok = r > 0.0; break;          // (0, +inf]
    case ScalarKind::MaxProd: ok = r >= 0.0 && r < kInf; break;
    case ScalarKind::MinSum: ok = r > -kInf; break;
    case ScalarKind::MaxSum: ok = r < kInf; break;
    case ScalarKind::MaxMin: ok = !std::isnan(r); break;
    default: break;
  }
  if (!ok)
    runtime_error("semiring-domain-violation",
                  std::string(scalar_kind_name(kind)) + " value out of domain: " +
                      std::to_string(r));
}

Value canonicalize(const Value& v) {
  if (v.is_scalar()) return v;
  if (v.is_record()) {
    std::vector<std::pair<std::string, Value>> fields;
    fields.reserve(v.fields().size());
    for (const auto& f : v.fields())
      fields.emplace_back(f.first, canonicalize(f.second));
    return Value::record(std::move(fields));
  }
  std::vector<std::pair<Value, Value>> out;
  out.reserve(v.entries().size());
  for (const auto& [k, val] : v.entries()) {
    Value ck = canonicalize(k);
    Value cv = canonicalize(val);
    if (is_zero_value(cv)) continue;
    out.emplace_back(std::move(ck), std::move(cv));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return compare_values(a.first, b.first) < 0;
  });
  // Combine duplicate keys with semi-ring addition.
  std::vector<std::pair<Value, Value>> merged;
  merged.reserve(out.size());
  for (auto& e : out) {
    if (!merged.empty() && compare_values(merged.back().first, e.first) == 0) {
      Value s = add_values(merged.back().second, e.second);
      if (is_zero_value(s))
        merged.pop_back();
      else
        merged.back().second = std::move(s);
    } else {
      merged.push_back(std::move(e));
    }
  }
  Value result;
  Value::DictRep d;
  d.entries = std::move(merged);
  d.dense = v.dense();
  result.rep_ = std::move(d);
  return result;
}

namespace {

Value add_scalars(const Value& a, const Value& b) {
  ScalarKind k = a.scalar_kind();
  if (k != b.scalar_kind())
    runtime_error("add-type-mismatch", "scalar kinds differ in addition");
  switch (k) {
    case ScalarKind::Bool: return Value::boolean(a.as_bool() || b.as_bool());
    case ScalarKind::Int: return Value::integer(a.as_int() + b.as_int());
    case ScalarKind::Nat:
      return Value::integer(a.as_int() + b.as_int(), ScalarKind::Nat);
    case ScalarKind::Real: return Value::real(a.as_real() + b.as_real());
    case ScalarKind::MinProd:
      return Value::real(std::min(a.as_real(), b.as_real()), k);
    case ScalarKind::MaxProd:
      return Value::real(std::max(a.as_real(), b.as_real()), k);
    case ScalarKind::MinSum:
      return Value::real(std::min(a.as_real(), b.as_real()), k);
    case ScalarKind::MaxSum:
      return Value::real(std::max(a.as_real(), b.as_real()), k);
    case ScalarKind::MaxMin:
      return Value::real(std::max(a.as_real(), b.as_real()), k);
    case ScalarKind::String:
      runtime_error("no-semiring-for-string-value", "cannot add strings");
  }
  internal_error("add-bad-kind", "unreachable");
}

Value mul_scalars(const Value& a0, const Value& b0) {
  Value a = a0, b = b0;
  if (a.scalar_kind() != b.scalar_kind()) {
    auto j = scalar_join(a.scalar_kind(), b.scalar_kind());
    if (!j)
      runtime_error("mul-undefined-tensor-type",
                    "cannot multiply mismatched scalar kinds");
    a = promote_value(a, *j);
    b = promote_value(b, *j);
  }
  ScalarKind k = a.scalar_kind();
  switch (k) {
    case ScalarKind::Bool: return Value::boolean(a.as_bool() && b.as_bool());
    case ScalarKind::Int: return Value::integer(a.as_int() * b.as_int());
    case ScalarKind::Nat:
      return Value::integer(a.as_int() * b.as_int(), ScalarKind::Nat);
    case ScalarKind::Real: return Value::real(a.as_real() * b.as_real());
    case ScalarKind::MinProd: {
      // inf * anything stays inf (the additive zero annihilates from the
      // addition side only; multiplicatively inf absorbs).
      return Value::real(a.as_real() * b.as_real(), k);
    }
    case ScalarKind::MaxProd: return Value::real(a.as_real() * b.as_real(), k);
    case ScalarKind::MinSum: return Value::real(a.as_real() + b.as_real(), k);
    case ScalarKind::MaxSum: return Value::real(a.as_real() + b.as_real(), k);
    case ScalarKind::MaxMin:
      return Value::real(std::min(a.as_real(), b.as_real()), k);
    case ScalarKind::String:
      runtime_error("no-semiring-for-string-value", "cannot multiply strings");
  }
  internal_error("mul-bad-kind", "unreachable");
}

} // namespace

Value add_values(const Value& a, const Value& b) {
  if (a.is_dict() && b.is_dict()) {
    const auto& ea = a.entries();
    const auto& eb = b.entries();
    std::vector<std::pair<Value, Value>> out;
    out.reserve(ea.size() + eb.size());
    size_t i = 0, j = 0;
    while (i < ea.size() && j < eb.size()) {
      int c = compare_values(ea[i].first, eb[j].first);
      if (c < 0)
        out.push_back(ea[i++]);
      else if (c > 0)
        out.push_back(eb[j++]);
      else {
        Value s = add_values(ea[i].second, eb[j].second);
        if (!is_zero_value(s)) out.emplace_back(ea[i].first, std::move(s));
        ++i;
        ++j;
      }
    }
    for (; i < ea.size(); ++i) out.push_back(ea[i]);
    for (; j < eb.size(); ++j) out.push_back(eb[j]);
    return Value::dict(std::move(out));
  }
  if (a.is_record() && b.is_record()) {
    const auto& fa = a.fields();
    const auto& fb = b.fields();
    if (fa.size() != fb.size())
      runtime_error("add-type-mismatch", "record arities differ in addition");
    std::vector<std::pair<std::string, Value>> fields;
    fields.reserve(fa.size());
    for (size_t k = 0; k < fa.size(); ++k) {
      if (fa[k].first != fb[k].first)
        runtime_error("add-type-mismatch", "record fields differ in addition");
      fields.emplace_back(fa[k].first, add_values(fa[k].second, fb[k].second));
    }
    return Value::record(std::move(fields));
  }
  if (a.is_scalar() && b.is_scalar()) return add_scalars(a, b);
  runtime_error("add-type-mismatch", "operand shapes differ in addition");
}

Value mul_values(const Value& a, const Value& b) {
  if (a.is_dict()) {
    std::vector<std::pair<Value, Value>> out;
    out.reserve(a.entries().size());
    for (const auto& [k, v] : a.entries())
      out.emplace_back(k, mul_values(v, b));
    return Value::dict(std::move(out), a.dense());
  }
  if (a.is_record()) {
    std::vector<std::pair<std::string, Value>> fields;
    fields.reserve(a.fields().size());
    for (const auto& [name, v] : a.fields())
      fields.emplace_back(name, mul_values(v, b));
    return Value::record(std::move(fields));
  }
  if (a.is_string())
    runtime_error("no-semiring-for-string-value", "cannot multiply strings");
  // Scalar on the left; map into the right structure.
  if (b.is_dict()) {
    std::vector<std::pair<Value, Value>> out;
    out.reserve(b.entries().size());
    for (const auto& [k, v] : b.entries())
      out.emplace_back(k, mul_values(a, v));
    return Value::dict(std::move(out), b.dense());
  }
  if (b.is_record()) {
    std::vector<std::pair<std::string, Value>> fields;
    fields.reserve(b.fields().size());
    for (const auto& [name, v] : b.fields())
      fields.emplace_back(name, mul_values(a, v));
    return Value::record(std::move(fields));
  }
  return mul_scalars(a, b);
}

Value promote_value(const Value& v, ScalarKind target) {
  if (!v.is_scalar() || !scalar_subtype(v.scalar_kind(), target))
    runtime_error("invalid-promotion", "promotion requires a scalar subtype");
  if (v.scalar_kind() == target) return v;
  int64_t n = v.is_bool() ? (v.as_bool() ? 1 : 0) : v.as_int();
  if (target == ScalarKind::Int) return Value::integer(n);
  if (v.is_real()) return v;
  return Value::real(static_cast<double>(n));
}

Value zero_like(const Value& v) {
  if (v.is_dict()) return Value::empty_dict(v.dense());
  if (v.is_record()) {
    std::vector<std::pair<std::string, Value>> fields;
    fields.reserve(v.fields().size());
    for (const auto& f : v.fields())
      fields.emplace_back(f.first, zero_like(f.second));
    return Value::record(std::move(fields));
  }
  if (v.is_string())
    runtime_error("no-semiring-for-string-value", "string has no zero");
  return zero_of(scalar_type(v.scalar_kind()));
}

Value lookup_value(const Value& dict, const Value& key, const TypePtr& value_type) {
  if (!dict.is_dict())
    runtime_error("lookup-non-dictionary", "lookup requires a dictionary");
  Value ck = canonicalize(key);
  const auto& es = dict.entries();
  auto it = std::lower_bound(
      es.begin(), es.end(), ck, [](const auto& e, const Value& k) {
        return compare_values(e.first, k) < 0;
      });
  if (it != es.end() && compare_values(it->first, ck) == 0) return it->second;
  if (value_type) return zero_of(value_type);
  if (!es.empty()) return zero_like(es.front().second);
  runtime_error("lookup-untyped-empty-dictionary",
                "cannot produce zero for lookup in untyped empty dictionary");
}

namespace {

void dump_rec(const Value& v, std::ostream& os) {
  if (v.is_bool()) {
    os << (v.as_bool() ? "true" : "false");
    return;
  }
  if (v.is_int()) {
    if (v.scalar_kind() == ScalarKind::Nat)
      os << "nat(" << v.as_int() << ")";
    else
      os << v.as_int();
    return;
  }
  if (v.is_real()) {
    std::string body;
    double r = v.as_real();
    if (r == kInf)
      body = "inf";
    else if (r == -kInf)
      body = "-inf";
    else {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << r;
      body = tmp.str();
      // Reals always carry a decimal point (or exponent).
      if (body.find('.') == std::string::npos &&
          body.find('e') == std::string::npos &&
          body.find("inf") == std::string::npos)
        body += ".0";
    }
    if (v.scalar_kind() == ScalarKind::Real)
      os << body;
    else
      os << scalar_kind_name(v.scalar_kind()) << "(" << body << ")";
    return;
  }
  if (v.is_string()) {
    os << '"';
    for (char c : v.as_string()) {
      if (c == '"' || c == '\\') os << '\\';
      os << c;
    }
    os << '"';
    return;
  }
  if (v.is_record()) {
    os << "<";
    bool first = true;
    for (const auto& [name, fv] : v.fields()) {
      if (!first) os << ", ";
      first = false;
      os << name << "=";
      dump_rec(fv, os);
    }
    os << ">";
    return;
  }
  if (v.entries().empty()) {
    os << "{ }";
    return;
  }
  os << "{ ";
  bool first = true;
  for (const auto& [k, val] : v.entries()) {
    if (!first) os << ", ";
    first = false;
    dump_rec(k, os);
    os << " -> ";
    dump_rec(val, os);
  }
  os << " }";
}

} // namespace

std::string dump_value(const Value& v) {
  std::ostringstream os;
  dump_rec(canonicalize(v), os);
  return os.str();
}

bool value_has_type(const Value& v, const TypePtr& t) {
  if (!t) return false;
  switch (t->kind) {
    case Type::Kind::Scalar:
      return v.is_scalar() && v.scalar_kind() == t->scalar;
    case Type::Kind::Record: {
      if (!v.is_record() || v.fields().size() != t->fields.size()) return false;
      for (size_t i = 0; i < t->fields.size(); ++i) {
        if (v.fields()[i].first != t->fields[i].first) return false;
        if (!value_has_type(v.fields()[i].second, t->fields[i].second))
          return false;
      }
      return true;
    }
    case Type::Kind::Dict: {
      if (!v.is_dict()) return false;
      for (const auto& [k, val] : v.entries()) {
        if (!value_has_type(k, t->key)) return false;
        if (!value_has_type(val, t->val)) return false;
      }
      return true;
    }
  }
  return false;
}

TypePtr infer_value_type(const Value& v) {
  if (v.is_scalar()) return scalar_type(v.scalar_kind());
  if (v.is_record()) {
    std::vector<std::pair<std::string, TypePtr>> fields;
    for (const auto& [name, fv] : v.fields()) {
      TypePtr ft = infer_value_type(fv);
      if (!ft) return nullptr;
      fields.emplace_back(name, ft);
    }
    return record_type(std::move(fields));
  }
  if (v.entries().empty()) return nullptr;
  TypePtr kt = infer_value_type(v.entries().front().first);
  TypePtr vt = infer_value_type(v.entries().front().second);
  if (!kt || !vt) return nullptr;
  return dict_type(kt, vt,
                   v.dense() ? DictLayout::DenseArray : DictLayout::Hash);
}

} // namespace sdql
