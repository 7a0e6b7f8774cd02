#include "sdql/frontends.hpp"

#include <map>

#include "sdql/errors.hpp"
#include "sdql/typecheck.hpp"

namespace sdql {

ExprPtr apply_frag(const Frag& f, const ExprPtr& arg) {
  return subst(f.body, f.var, arg);
}

ExprPtr apply_frag(const Frag2& f, const ExprPtr& a1, const ExprPtr& a2) {
  return subst(subst(f.body, f.var1, a1), f.var2, a2);
}

// ---- relational algebra ---------------------------------------------------

namespace {

RAPtr mk_ra(RAExpr e) { return std::make_shared<const RAExpr>(std::move(e)); }

ExprPtr set_sng(ExprPtr key) {
  return mk_dict({std::move(key), mk_bool(true)});
}

TypePtr frag_type(const Frag& f, const TypePtr& arg_type) {
  TypeEnv env;
  env.bind(f.var, arg_type);
  return typecheck(env, f.body).type;
}

} // namespace

RAPtr ra_scan(std::string name, TypePtr row_type) {
  RAExpr e{};
  e.kind = RAExpr::Kind::Scan;
  e.name = std::move(name);
  e.row_type = std::move(row_type);
  return mk_ra(std::move(e));
}
RAPtr ra_select(Frag pred, RAPtr in) {
  RAExpr e{};
  e.kind = RAExpr::Kind::Select;
  e.pred = std::move(pred);
  e.left = std::move(in);
  return mk_ra(std::move(e));
}
RAPtr ra_project(Frag fn, RAPtr in) {
  RAExpr e{};
  e.kind = RAExpr::Kind::Project;
  e.fn = std::move(fn);
  e.left = std::move(in);
  return mk_ra(std::move(e));
}
namespace {
RAPtr ra_binary(RAExpr::Kind k, RAPtr l, RAPtr r) {
  RAExpr e{};
  e.kind = k;
  e.left = std::move(l);
  e.right = std::move(r);
  return mk_ra(std::move(e));
}
} // namespace
RAPtr ra_union(RAPtr l, RAPtr r) { return ra_binary(RAExpr::Kind::Union, l, r); }
RAPtr ra_intersect(RAPtr l, RAPtr r) { return ra_binary(RAExpr::Kind::Intersect, l, r); }
RAPtr ra_difference(RAPtr l, RAPtr r) { return ra_binary(RAExpr::Kind::Difference, l, r); }
RAPtr ra_product(RAPtr l, RAPtr r) { return ra_binary(RAExpr::Kind::Product, l, r); }
RAPtr ra_join(Frag theta, RAPtr l, RAPtr r) {
  RAExpr e{};
  e.kind = RAExpr::Kind::Join;
  e.pred = std::move(theta);
  e.left = std::move(l);
  e.right = std::move(r);
  return mk_ra(std::move(e));
}
RAPtr ra_groupagg(Frag keys, Frag fn, RAPtr in) {
  RAExpr e{};
  e.kind = RAExpr::Kind::GroupAgg;
  e.keys = std::move(keys);
  e.fn = std::move(fn);
  e.left = std::move(in);
  return mk_ra(std::move(e));
}

TypePtr ra_schema(const RAPtr& q) {
  switch (q->kind) {
  case RAExpr::Kind::Scan:
    return q->row_type;
  case RAExpr::Kind::Select:
    return ra_schema(q->left);
  case RAExpr::Kind::Project: {
    TypePtr t = frag_type(q->fn, ra_schema(q->left));
    if (!t->is_record())
      type_error("projection-not-record", type_to_string(t));
    return t;
  }
  case RAExpr::Kind::Union:
  case RAExpr::Kind::Intersect:
  case RAExpr::Kind::Difference: {
    TypePtr l = ra_schema(q->left), r = ra_schema(q->right);
    if (!types_equal(l, r))
      type_error("schema-mismatch",
                 type_to_string(l) + " vs " + type_to_string(r));
    return l;
  }
  case RAExpr::Kind::Product:
  case RAExpr::Kind::Join: {
    TypePtr l = ra_schema(q->left), r = ra_schema(q->right);
    std::vector<std::pair<std::string, TypePtr>> fields = l->fields;
    for (const auto& f : r->fields) {
      if (record_field(l, f.first))
        type_error("product-field-clash", f.first);
      fields.push_back(f);
    }
    return record_type(std::move(fields));
  }
  case RAExpr::Kind::GroupAgg: {
    TypePtr row = ra_schema(q->left);
    if (q->keys.empty())
      internal_error("scalar-aggregate-has-no-schema", "use lower_ra directly");
    return record_type({{"key", frag_type(q->keys, row)},
                        {"val", frag_type(q->fn, row)}});
  }
  }
  internal_error("unhandled-ra-kind", "ra_schema");
}

ExprPtr lower_ra(const RAPtr& q) {
  switch (q->kind) {
  case RAExpr::Kind::Scan:
    return mk_var(q->name);
  case RAExpr::Kind::Select: {
    ExprPtr in = lower_ra(q->left);
    std::string x = fresh_var("x", {q->pred.body, in});
    return mk_sum(x, in,
                  mk_if(apply_frag(q->pred, field_of(x, "key")),
                        set_sng(field_of(x, "key"))));
  }
  case RAExpr::Kind::Project: {
    ExprPtr in = lower_ra(q->left);
    std::string x = fresh_var("x", {q->fn.body, in});
    return mk_sum(x, in, set_sng(apply_frag(q->fn, field_of(x, "key"))));
  }
  case RAExpr::Kind::Union:
    return mk_add(lower_ra(q->left), lower_ra(q->right));
  case RAExpr::Kind::Intersect: {
    ExprPtr l = lower_ra(q->left), r = lower_ra(q->right);
    std::string x = fresh_var("x", {l, r});
    return mk_sum(x, l,
                  mk_if(mk_lookup(r, field_of(x, "key")),
                        set_sng(field_of(x, "key"))));
  }
  case RAExpr::Kind::Difference: {
    ExprPtr l = lower_ra(q->left), r = lower_ra(q->right);
    std::string x = fresh_var("x", {l, r});
    TypePtr row = ra_schema(q);
    return mk_sum(x, l,
                  mk_if(mk_lookup(r, field_of(x, "key")),
                        mk_empty_dict(row, bool_type()),
                        set_sng(field_of(x, "key"))));
  }
  case RAExpr::Kind::Product: {
    ra_schema(q);  // field-clash check
    ExprPtr l = lower_ra(q->left), r = lower_ra(q->right);
    std::string x = fresh_var("x", {l, r});
    std::string y = fresh_var("y", {l, r, mk_var(x)});
    return mk_sum(x, l,
                  mk_sum(y, r,
                         set_sng(mk_concat(field_of(x, "key"),
                                           field_of(y, "key")))));
  }
  case RAExpr::Kind::Join:
    // R join_theta S = select_theta (R x S)
    return lower_ra(ra_select(q->pred, ra_product(q->left, q->right)));
  case RAExpr::Kind::GroupAgg: {
    ExprPtr in = lower_ra(q->left);
    if (q->keys.empty()) {
      std::string x = fresh_var("x", {q->fn.body, in});
      return mk_sum(x, in,
                    mk_mul(field_of(x, "val"),
                           apply_frag(q->fn, field_of(x, "key"))));
    }
    std::string x = fresh_var("x", {q->fn.body, q->keys.body, in});
    ExprPtr tmp_sum = mk_sum(
        x, in,
        mk_dict({apply_frag(q->keys, field_of(x, "key")),
                 mk_mul(field_of(x, "val"),
                        apply_frag(q->fn, field_of(x, "key")))}));
    std::string t = fresh_var("tmp", {in});
    return mk_let(t, tmp_sum,
                  mk_sum(x, mk_var(t),
                         set_sng(mk_record({"key", "val"},
                                           {field_of(x, "key"),
                                            field_of(x, "val")}))));
  }
  }
  internal_error("unhandled-ra-kind", "lower_ra");
}

// ---- NRC+ -----------------------------------------------------------------

namespace {
NRCPtr mk_nrc(NRCExpr e) { return std::make_shared<const NRCExpr>(std::move(e)); }
} // namespace

NRCPtr nrc_var(std::string name) {
  NRCExpr e{};
  e.kind = NRCExpr::Kind::Var;
  e.name = std::move(name);
  return mk_nrc(std::move(e));
}
NRCPtr nrc_raw(ExprPtr ex) {
  NRCExpr e{};
  e.kind = NRCExpr::Kind::Raw;
  e.raw = std::move(ex);
  return mk_nrc(std::move(e));
}
NRCPtr nrc_let(std::string name, NRCPtr bound, NRCPtr body) {
  NRCExpr e{};
  e.kind = NRCExpr::Kind::Let;
  e.name = std::move(name);
  e.e1 = std::move(bound);
  e.e2 = std::move(body);
  return mk_nrc(std::move(e));
}
NRCPtr nrc_empty(TypePtr elem) {
  NRCExpr e{};
  e.kind = NRCExpr::Kind::Empty;
  e.elem = std::move(elem);
  return mk_nrc(std::move(e));
}
NRCPtr nrc_sng(ExprPtr elem) {
  NRCExpr e{};
  e.kind = NRCExpr::Kind::Sng;
  e.raw = std::move(elem);
  return mk_nrc(std::move(e));
}
NRCPtr nrc_flatten(NRCPtr in) {
  NRCExpr e{};
  e.kind = NRCExpr::Kind::Flatten;
  e.e1 = std::move(in);
  return mk_nrc(std::move(e));
}
NRCPtr nrc_for(std::string var, NRCPtr src, NRCPtr body) {
  NRCExpr e{};
  e.kind = NRCExpr::Kind::ForUnion;
  e.name = std::move(var);
  e.e1 = std::move(src);
  e.e2 = std::move(body);
  return mk_nrc(std::move(e));
}
NRCPtr nrc_union(NRCPtr l, NRCPtr r) {
  NRCExpr e{};
  e.kind = NRCExpr::Kind::BagUnion;
  e.e1 = std::move(l);
  e.e2 = std::move(r);
  return mk_nrc(std::move(e));
}
NRCPtr nrc_product(NRCPtr l, NRCPtr r) {
  NRCExpr e{};
  e.kind = NRCExpr::Kind::BagProduct;
  e.e1 = std::move(l);
  e.e2 = std::move(r);
  return mk_nrc(std::move(e));
}
NRCPtr nrc_sum_by(Frag keys, Frag fn, NRCPtr in) {
  NRCExpr e{};
  e.kind = NRCExpr::Kind::SumBy;
  e.keys = std::move(keys);
  e.fn = std::move(fn);
  e.e1 = std::move(in);
  return mk_nrc(std::move(e));
}
NRCPtr nrc_group_by(Frag keys, NRCPtr in) {
  NRCExpr e{};
  e.kind = NRCExpr::Kind::GroupBy;
  e.keys = std::move(keys);
  e.e1 = std::move(in);
  return mk_nrc(std::move(e));
}

ExprPtr lower_nrc(const NRCPtr& q) {
  switch (q->kind) {
  case NRCExpr::Kind::Var:
    return mk_var(q->name);
  case NRCExpr::Kind::Raw:
    return q->raw;
  case NRCExpr::Kind::Let:
    return mk_let(q->name, lower_nrc(q->e1), lower_nrc(q->e2));
  case NRCExpr::Kind::Empty:
    return mk_empty_dict(q->elem, int_type());
  case NRCExpr::Kind::Sng:
    return mk_dict({q->raw, mk_int(1)});
  case NRCExpr::Kind::Flatten: {
    ExprPtr in = lower_nrc(q->e1);
    std::string x = fresh_var("x", {in});
    return mk_sum(x, in, mk_mul(field_of(x, "val"), field_of(x, "key")));
  }
  case NRCExpr::Kind::ForUnion: {
    ExprPtr src = lower_nrc(q->e1);
    ExprPtr body = lower_nrc(q->e2);
    std::string y = fresh_var("y", {src, body, mk_var(q->name)});
    return mk_sum(y, src,
                  mk_let(q->name, field_of(y, "key"),
                         mk_mul(field_of(y, "val"), body)));
  }
  case NRCExpr::Kind::BagUnion:
    return mk_add(lower_nrc(q->e1), lower_nrc(q->e2));
  case NRCExpr::Kind::BagProduct: {
    ExprPtr l = lower_nrc(q->e1), r = lower_nrc(q->e2);
    std::string x = fresh_var("x", {l, r});
    std::string y = fresh_var("y", {l, r, mk_var(x)});
    return mk_sum(
        x, l,
        mk_sum(y, r,
               mk_dict({mk_record({"fst", "snd"},
                                  {field_of(x, "key"), field_of(y, "key")}),
                        mk_mul(field_of(x, "val"), field_of(y, "val"))})));
  }
  case NRCExpr::Kind::SumBy: {
    ExprPtr in = lower_nrc(q->e1);
    if (q->keys.empty()) {
      std::string x = fresh_var("x", {q->fn.body, in});
      return mk_sum(x, in,
                    mk_mul(field_of(x, "val"),
                           apply_frag(q->fn, field_of(x, "key"))));
    }
    std::string x = fresh_var("x", {q->fn.body, q->keys.body, in});
    ExprPtr tmp_sum = mk_sum(
        x, in,
        mk_dict({apply_frag(q->keys, field_of(x, "key")),
                 mk_mul(field_of(x, "val"),
                        apply_frag(q->fn, field_of(x, "key")))}));
    std::string t = fresh_var("tmp", {in});
    return mk_let(t, tmp_sum,
                  mk_sum(x, mk_var(t),
                         mk_dict({mk_record({"key", "val"},
                                            {field_of(x, "key"),
                                             field_of(x, "val")}),
                                  mk_int(1)})));
  }
  case NRCExpr::Kind::GroupBy: {
    ExprPtr in = lower_nrc(q->e1);
    std::string x = fresh_var("x", {q->keys.body, in});
    ExprPtr tmp_sum = mk_sum(
        x, in,
        mk_dict({apply_frag(q->keys, field_of(x, "key")),
                 mk_dict({field_of(x, "key"), field_of(x, "val")})}));
    std::string t = fresh_var("tmp", {in});
    return mk_let(t, tmp_sum,
                  mk_sum(x, mk_var(t),
                         mk_dict({mk_record({"key", "val"},
                                            {field_of(x, "key"),
                                             field_of(x, "val")}),
                                  mk_int(1)})));
  }
  }
  internal_error("unhandled-nrc-kind", "lower_nrc");
}

// ---- linear algebra -------------------------------------------------------

LAPtr la_ref(std::string name) {
  LAExpr e{};
  e.kind = LAExpr::Kind::Ref;
  e.name = std::move(name);
  return std::make_shared<const LAExpr>(std::move(e));
}
LAPtr la_scalar(ExprPtr ex) {
  LAExpr e{};
  e.kind = LAExpr::Kind::Scalar;
  e.scalar = std::move(ex);
  return std::make_shared<const LAExpr>(std::move(e));
}
LAPtr la_op(LAExpr::Kind kind, LAPtr l, LAPtr r) {
  LAExpr e{};
  e.kind = kind;
  e.l = std::move(l);
  e.r = std::move(r);
  return std::make_shared<const LAExpr>(std::move(e));
}

ExprPtr lower_la(const LAPtr& q, LALayout layout) {
  const bool curried = layout == LALayout::Curried;
  auto low = [&](const LAPtr& p) { return lower_la(p, layout); };
  switch (q->kind) {
  case LAExpr::Kind::Ref:
    return mk_var(q->name);
  case LAExpr::Kind::Scalar:
    return q->scalar;
  case LAExpr::Kind::VecAdd:
  case LAExpr::Kind::MatAdd:
    return mk_add(low(q->l), low(q->r));
  case LAExpr::Kind::ScalarVec:
  case LAExpr::Kind::ScalarMat:
    return mk_mul(low(q->l), low(q->r));
  case LAExpr::Kind::VecHadamard: {
    ExprPtr v1 = low(q->l), v2 = low(q->r);
    std::string x = fresh_var("x", {v1, v2});
    return mk_sum(x, v1,
                  mk_dict({field_of(x, "key"),
                           mk_mul(field_of(x, "val"),
                                  mk_lookup(v2, field_of(x, "key")))}));
  }
  case LAExpr::Kind::VecDot: {
    ExprPtr v1 = low(q->l), v2 = low(q->r);
    std::string x = fresh_var("x", {v1, v2});
    return mk_sum(x, v1,
                  mk_mul(field_of(x, "val"), mk_lookup(v2, field_of(x, "key"))));
  }
  case LAExpr::Kind::VecSum: {
    ExprPtr v = low(q->l);
    std::string x = fresh_var("x", {v});
    return mk_sum(x, v, field_of(x, "val"));
  }
  case LAExpr::Kind::MatTranspose: {
    ExprPtr m = low(q->l);
    if (!curried) {
      std::string x = fresh_var("x", {m});
      return mk_sum(x, m,
                    mk_dict({mk_record({"row", "col"},
                                       {field_of(x, "key", "col"),
                                        field_of(x, "key", "row")}),
                             field_of(x, "val")}));
    }
    std::string row = fresh_var("row", {m});
    std::string x = fresh_var("x", {m, mk_var(row)});
    return mk_sum(row, m,
                  mk_sum(x, field_of(row, "val"),
                         mk_dict({field_of(x, "key"),
                                  mk_dict({field_of(row, "key"),
                                           field_of(x, "val")})})));
  }
  case LAExpr::Kind::MatHadamard: {
    ExprPtr m1 = low(q->l), m2 = low(q->r);
    if (!curried) {
      std::string x = fresh_var("x", {m1, m2});
      return mk_sum(x, m1,
                    mk_dict({field_of(x, "key"),
                             mk_mul(field_of(x, "val"),
                                    mk_lookup(m2, field_of(x, "key")))}));
    }
    std::string row = fresh_var("row", {m1, m2});
    std::string x = fresh_var("x", {m1, m2, mk_var(row)});
    return mk_sum(
        row, m1,
        mk_dict({field_of(row, "key"),
                 mk_sum(x, field_of(row, "val"),
                        mk_dict({field_of(x, "key"),
                                 mk_mul(field_of(x, "val"),
                                        mk_lookup(mk_lookup(m2, field_of(row, "key")),
                                                  field_of(x, "key")))}))}));
  }
  case LAExpr::Kind::MatMul: {
    ExprPtr m1 = low(q->l), m2 = low(q->r);
    if (!curried) {
      std::string x = fresh_var("x", {m1, m2});
      std::string y = fresh_var("y", {m1, m2, mk_var(x)});
      return mk_sum(
          x, m1,
          mk_sum(y, m2,
                 mk_if(mk_cmp(CmpOp::Eq, field_of(x, "key", "col"),
                              field_of(y, "key", "row")),
                       mk_dict({mk_record({"row", "col"},
                                          {field_of(x, "key", "row"),
                                           field_of(y, "key", "col")}),
                                mk_mul(field_of(x, "val"),
                                       field_of(y, "val"))}))));
    }
    std::string row = fresh_var("row", {m1, m2});
    std::string x = fresh_var("x", {m1, m2, mk_var(row)});
    std::string y = fresh_var("y", {m1, m2, mk_var(row), mk_var(x)});
    return mk_sum(
        row, m1,
        mk_dict({field_of(row, "key"),
                 mk_sum(x, field_of(row, "val"),
                        mk_sum(y, mk_lookup(m2, field_of(x, "key")),
                               mk_dict({field_of(y, "key"),
                                        mk_mul(field_of(x, "val"),
                                               field_of(y, "val"))})))}));
  }
  case LAExpr::Kind::MatVec: {
    ExprPtr m = low(q->l), v = low(q->r);
    if (!curried) {
      std::string x = fresh_var("x", {m, v});
      return mk_sum(x, m,
                    mk_dict({field_of(x, "key", "row"),
                             mk_mul(field_of(x, "val"),
                                    mk_lookup(v, field_of(x, "key", "col")))}));
    }
    std::string row = fresh_var("row", {m, v});
    std::string x = fresh_var("x", {m, v, mk_var(row)});
    return mk_sum(row, m,
                  mk_dict({field_of(row, "key"),
                           mk_sum(x, field_of(row, "val"),
                                  mk_mul(field_of(x, "val"),
                                         mk_lookup(v, field_of(x, "key"))))}));
  }
  case LAExpr::Kind::Trace: {
    ExprPtr m = low(q->l);
    if (!curried) {
      std::string x = fresh_var("x", {m});
      return mk_sum(x, m,
                    mk_if(mk_cmp(CmpOp::Eq, field_of(x, "key", "row"),
                                 field_of(x, "key", "col")),
                          field_of(x, "val")));
    }
    std::string row = fresh_var("row", {m});
    return mk_sum(row, m,
                  mk_lookup(field_of(row, "val"), field_of(row, "key")));
  }
  }
  internal_error("unhandled-la-kind", "lower_la");
}

// ---- physical joins -------------------------------------------------------

ExprPtr build_hash_join(ExprPtr left, ExprPtr right, Frag part_l, Frag part_r,
                        Frag2 combine) {
  std::vector<ExprPtr> avoid = {left, right, part_l.body, part_r.body, combine.body};
  std::string sp = fresh_var("Sp", avoid);
  std::string s = fresh_var("s", avoid);
  std::string r = fresh_var("r", avoid);
  avoid.push_back(mk_var(r));
  std::string pk = fresh_var("pkey", avoid);
  avoid.push_back(mk_var(s));
  std::string s2 = fresh_var("s2", avoid);
  ExprPtr build = mk_sum(
      s, right,
      mk_dict({apply_frag(part_r, field_of(s, "key")),
               mk_dict({field_of(s, "key"), field_of(s, "val")})}));
  ExprPtr probe = mk_sum(
      r, left,
      mk_let(pk, apply_frag(part_l, field_of(r, "key")),
             mk_sum(s2, mk_lookup(mk_var(sp), mk_var(pk)),
                    mk_dict({apply_frag(combine, field_of(r, "key"),
                                        field_of(s2, "key")),
                             mk_mul(field_of(r, "val"),
                                    field_of(s2, "val"))}))));
  return mk_let(sp, build, probe);
}

ExprPtr build_groupjoin(ExprPtr left, ExprPtr right, Frag part, Frag f, Frag g) {
  std::vector<ExprPtr> avoid = {left, right, part.body, f.body, g.body};
  std::string sagg = fresh_var("Sagg", avoid);
  std::string s = fresh_var("s", avoid);
  std::string r = fresh_var("r", avoid);
  ExprPtr build = mk_sum(s, right,
                         mk_dict({apply_frag(part, field_of(s, "key")),
                                  apply_frag(g, mk_var(s))}));
  ExprPtr probe = mk_sum(
      r, left,
      mk_dict({apply_frag(part, field_of(r, "key")),
               mk_mul(apply_frag(f, mk_var(r)),
                      mk_lookup(mk_var(sagg),
                                apply_frag(part, field_of(r, "key"))))}));
  return mk_let(sagg, build, probe);
}

// ---- layout conversions ---------------------------------------------------

Value flat_to_curried(const Value& m) {
  std::vector<std::pair<Value, Value>> out;
  for (const auto& [k, v] : m.entries()) {
    if (!k.is_record() || k.fields().size() != 2)
      runtime_error("flat-matrix-key-shape", "expected a two-field record key");
    out.emplace_back(k.fields()[0].second,
                     Value::dict({{k.fields()[1].second, v}}));
  }
  return Value::dict(std::move(out));
}

Value curried_to_flat(const Value& m, const std::string& row_field,
                      const std::string& col_field) {
  std::vector<std::pair<Value, Value>> out;
  for (const auto& [row, inner] : m.entries())
    for (const auto& [col, v] : inner.entries())
      out.emplace_back(Value::record({{row_field, row}, {col_field, col}}), v);
  return Value::dict(std::move(out));
}

namespace {

Value factorize_rows(const std::vector<std::pair<Value, Value>>& rows,
                     const std::vector<std::string>& order, size_t depth) {
  if (depth + 1 == order.size()) {
    std::vector<std::pair<Value, Value>> out;
    for (const auto& [row, mult] : rows) {
      const Value* f = row.field(order[depth]);
      if (!f) runtime_error("no-such-field", order[depth]);
      out.emplace_back(*f, mult);
    }
    return Value::dict(std::move(out));
  }
  std::map<Value, std::vector<std::pair<Value, Value>>, ValueLess> groups;
  for (const auto& row : rows) {
    const Value* f = row.first.field(order[depth]);
    if (!f) runtime_error("no-such-field", order[depth]);
    groups[*f].push_back(row);
  }
  std::vector<std::pair<Value, Value>> out;
  for (const auto& [k, g] : groups)
    out.emplace_back(k, factorize_rows(g, order, depth + 1));
  return Value::dict(std::move(out));
}

void unfactorize(const Value& v, const std::vector<std::string>& order,
                 size_t depth, std::vector<std::pair<std::string, Value>>& prefix,
                 std::vector<std::pair<Value, Value>>& out) {
  for (const auto& [k, inner] : v.entries()) {
    prefix.emplace_back(order[depth], k);
    if (depth + 1 == order.size())
      out.emplace_back(Value::record(prefix), inner);
    else
      unfactorize(inner, order, depth + 1, prefix, out);
    prefix.pop_back();
  }
}

} // namespace

Value bag_to_factorized(const Value& rel, std::vector<std::string> order) {
  if (rel.entries().empty()) return Value::empty_dict();
  if (order.empty())
    for (const auto& f : rel.entries().front().first.fields())
      order.push_back(f.first);
  if (order.empty()) runtime_error("factorized-needs-attributes", "empty row");
  return factorize_rows(rel.entries(), order, 0);
}

Value factorized_to_bag(const Value& v, const std::vector<std::string>& order) {
  if (order.empty()) runtime_error("factorized-needs-attributes", "no order given");
  std::vector<std::pair<std::string, Value>> prefix;
  std::vector<std::pair<Value, Value>> out;
  unfactorize(v, order, 0, prefix, out);
  return Value::dict(std::move(out));
}

Value bag_to_row_array(const Value& rel) {
  std::vector<std::pair<Value, Value>> out;
  int64_t i = 0;
  for (const auto& [row, mult] : rel.entries()) {
    bool one = (mult.is_bool() && mult.as_bool()) ||
               (mult.is_int() && mult.as_int() == 1);
    if (!one)
      runtime_error("row-layout-duplicate-row",
                    "row arrays need a duplicate-free relation");
    out.emplace_back(Value::integer(i++), row);
  }
  return Value::dict(std::move(out), true);
}

Value row_array_to_bag(const Value& rows) {
  std::vector<std::pair<Value, Value>> out;
  for (const auto& [idx, row] : rows.entries())
    out.emplace_back(row, Value::integer(1));
  return Value::dict(std::move(out));
}

Value row_to_columnar(const Value& rows) {
  if (rows.entries().empty())
    runtime_error("columnar-needs-rows", "cannot derive columns of an empty array");
  std::vector<std::pair<std::string, Value>> cols;
  for (const auto& f : rows.entries().front().second.fields()) {
    std::vector<std::pair<Value, Value>> col;
    for (const auto& [idx, row] : rows.entries()) {
      const Value* cell = row.field(f.first);
      if (!cell) runtime_error("no-such-field", f.first);
      col.emplace_back(idx, *cell);
    }
    cols.emplace_back(f.first, Value::dict(std::move(col), true));
  }
  return Value::record(std::move(cols));
}

Value columnar_to_row(const Value& cols) {
  int64_t n = 0;
  for (const auto& [name, col] : cols.fields())
    for (const auto& [idx, cell] : col.entries())
      if (idx.as_int() + 1 > n) n = idx.as_int() + 1;
  std::vector<std::pair<Value, Value>> out;
  for (int64_t i = 0; i < n; ++i) {
    std::vector<std::pair<std::string, Value>> fields;
    for (const auto& [name, col] : cols.fields()) {
      if (col.entries().empty())
        runtime_error("columnar-column-untyped",
                      "an all-zero column cannot be reconstructed");
      fields.emplace_back(name,
                          lookup_value(col, Value::integer(i), nullptr));
    }
    out.emplace_back(Value::integer(i), Value::record(std::move(fields)));
  }
  return Value::dict(std::move(out), true);
}

// ---- layout-transparent scans ---------------------------------------------

ExprPtr scan_rows(const std::string& rel, ScanLayout layout, const Frag& body,
                  const std::vector<std::string>& attrs) {
  std::string x = fresh_var("x", {body.body, mk_var(rel)});
  switch (layout) {
  case ScanLayout::Dict:
    return mk_sum(x, mk_var(rel),
                  mk_mul(field_of(x, "val"),
                         apply_frag(body, field_of(x, "key"))));
  case ScanLayout::Row:
    return mk_sum(x, mk_var(rel), apply_frag(body, field_of(x, "val")));
  case ScanLayout::Columnar: {
    if (attrs.empty())
      runtime_error("columnar-scan-needs-attributes", "give the schema order");
    // iterate the first column; remaining fields become indexed lookups
    // correlated by the shared dense index
    std::vector<std::string> names;
    std::vector<ExprPtr> fields;
    names.push_back(attrs[0]);
    fields.push_back(field_of(x, "val"));
    for (size_t i = 1; i < attrs.size(); ++i) {
      names.push_back(attrs[i]);
      fields.push_back(mk_lookup(mk_field(mk_var(rel), attrs[i]),
                                 field_of(x, "key")));
    }
    ExprPtr row = mk_record(std::move(names), std::move(fields));
    return mk_sum(x, mk_field(mk_var(rel), attrs[0]), apply_frag(body, row));
  }
  }
  internal_error("unhandled-scan-layout", "scan_rows");
}

} // namespace sdql
