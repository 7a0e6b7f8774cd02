// Acceptance gate: eight end-to-end criteria, one pass/fail line each.
// Every criterion carries a wall-clock budget; a criterion fails if any
// check inside it fails or if it runs over budget. Exit status is zero
// only when all eight pass.
//
// Seeds come from SDQL_SEED when set (see tests/gen.hpp), so a failing
// run can be replayed exactly.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sdql/dataio.hpp"
#include "sdql/errors.hpp"
#include "sdql/frontends.hpp"
#include "sdql/interp.hpp"
#include "sdql/optimizer.hpp"
#include "sdql/parser.hpp"
#include "sdql/typecheck.hpp"
#include "frontends_gen.hpp"
#include "gen.hpp"

using namespace sdql;
using namespace sdqlgen;

namespace {

struct Ctx {
  long checks = 0;
  long failed = 0;
  std::vector<std::string> notes;  // first few failure descriptions

  void check(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++failed;
    if (notes.size() < 5) notes.push_back(what);
  }
};

Value run(const std::string& src, TypeEnv tenv = {}, Environment env = {}) {
  return eval(env, typecheck(tenv, parse(src)).expr);
}

std::string run_str(const std::string& src) { return dump_value(run(src)); }

// ---------------------------------------------------------------------------
// 1. Golden examples: additions, products, lookups, sums, the join-query
//    type, the Hadamard/mat-vec instantiations, and layout currying.
// ---------------------------------------------------------------------------

void crit_goldens(Ctx& c) {
  c.check(run_str("{ \"a\" -> 2, \"b\" -> 3 } + { \"a\" -> 4, \"c\" -> 5 }") ==
              "{ \"a\" -> 6, \"b\" -> 3, \"c\" -> 5 }",
          "dict addition golden");
  c.check(values_equal(parse_value("{ \"a\" -> 2, \"b\" -> 3 }"),
                       parse_value("{ \"b\" -> 3, \"a\" -> 2, \"c\" -> 0 }")),
          "zero entries are invisible to equality");
  c.check(run_str("{ \"a\" -> 2, \"b\" -> 3 } * { \"a\" -> 4, \"c\" -> 5 }") ==
              "{ \"a\" -> { \"a\" -> 8, \"c\" -> 10 }, "
              "\"b\" -> { \"a\" -> 12, \"c\" -> 15 } }",
          "dict product golden");
  c.check(run_str("{ \"a\" -> 4, \"c\" -> 5 } * { \"a\" -> 2, \"b\" -> 3 }") ==
              "{ \"a\" -> { \"a\" -> 8, \"b\" -> 12 }, "
              "\"c\" -> { \"a\" -> 10, \"b\" -> 15 } }",
          "dict product non-commutativity witness");
  c.check(run_str("{ \"a\" -> 2, \"b\" -> 3 } * < c = 4.0 >") ==
              "{ \"a\" -> <c=8.0>, \"b\" -> <c=12.0> }",
          "dict times record golden");

  std::string pre = "let d = { \"a\" -> 2, \"b\" -> 3 } in ";
  c.check(run_str(pre + "sum(x <- d) x.val") == "5", "sum of values golden");
  c.check(run_str(pre + "sum(x <- d) { x.key -> x.val * 2 }") ==
              "{ \"a\" -> 4, \"b\" -> 6 }",
          "sum to dictionary golden");

  // Typed product of a dictionary and a record.
  {
    TypeEnv env;
    env.bind("d", parse_type("{string -> int}"));
    env.bind("r", parse_type("<c: real>"));
    c.check(type_to_string(typecheck(env, parse("d * r")).type) ==
                "{string -> <c: real>}",
            "dict-times-record type golden");
  }

  // The gene/variant join query types to the documented bag of records.
  {
    TypeEnv env;
    env.bind("Genes",
             parse_type("{<name: string, desc: string, contig: int, "
                        "start: int, end: int, gid: string> -> bool}"));
    env.bind("Variants",
             parse_type("{<contig: int, start: int, reference: string, "
                        "alternate: string, genotypes: {<sample: string, "
                        "call: real> -> int}> -> int}"));
    std::string q =
        "sum(v <- Variants) sum(g <- Genes) "
        "if (g.key.contig == v.key.contig && g.key.start <= v.key.start && "
        "g.key.end >= v.key.start) then "
        "sum(c <- v.key.genotypes) "
        "{ <sample = c.key.sample, gene = g.key.name, burden = c.key.call> "
        "-> g.val * c.val * v.val } else { }";
    c.check(type_to_string(typecheck(env, parse(q)).type) ==
                "{<sample: string, gene: string, burden: real> -> int}",
            "join query type golden");
  }

  // Sparse vectors: lookups, Hadamard product, matrix-vector product.
  std::string vu =
      "let V = { 0 -> 1, 2 -> 2, 3 -> 3 } in "
      "let U = { 0 -> 4, 1 -> 5, 2 -> 6 } in ";
  c.check(run_str(vu + "V(2)") == "2", "lookup present key");
  c.check(run_str(vu + "U(3)") == "0", "lookup absent key yields zero");
  c.check(run_str(vu + "sum(x <- V) { x.key -> x.val * U(x.key) }") ==
              "{ 0 -> 4, 2 -> 12 }",
          "Hadamard product golden");
  c.check(run_str("let M = { <row=0, col=0> -> 7.0, <row=0, col=3> -> 8.0, "
                  "<row=1, col=1> -> 9.0 } in "
                  "let V = { 0 -> 1.0, 2 -> 2.0, 3 -> 3.0 } in "
                  "sum(x <- M) { x.key.row -> x.val * V(x.key.col) }") ==
              "{ 0 -> 31.0 }",
          "matrix-vector product golden");

  // Flat to curried matrix layout.
  Value flat = parse_value(
      "{ <row=0, col=0> -> 7.0, <row=0, col=3> -> 8.0, <row=1, col=1> -> "
      "9.0 }");
  Value cur = flat_to_curried(flat);
  c.check(dump_value(cur) ==
              "{ 0 -> { 0 -> 7.0, 3 -> 8.0 }, 1 -> { 1 -> 9.0 } }",
          "curried matrix golden");
  c.check(values_equal(curried_to_flat(cur), flat), "currying round-trips");
}

// ---------------------------------------------------------------------------
// 2. Semi-ring laws on generated value triples, scalar and nested.
// ---------------------------------------------------------------------------

void crit_semiring_laws(Ctx& c) {
  Rng rng(seed_from_env(101));

  // Scalar kinds: full law suite per kind.
  for (ScalarKind k : all_semiring_kinds()) {
    TypePtr t = scalar_type(k);
    Value zero = zero_of(t);
    Value one = one_of(k);
    for (int i = 0; i < 300; ++i) {
      Value a = random_scalar(rng, k);
      Value b = random_scalar(rng, k);
      Value d = random_scalar(rng, k);
      c.check(values_equal(add_values(a, b), add_values(b, a)),
              "scalar + commutativity");
      c.check(values_equal(add_values(add_values(a, b), d),
                           add_values(a, add_values(b, d))),
              "scalar + associativity");
      c.check(values_equal(add_values(a, zero), a), "scalar + identity");
      c.check(values_equal(mul_values(mul_values(a, b), d),
                           mul_values(a, mul_values(b, d))),
              "scalar * associativity");
      c.check(values_equal(mul_values(a, one), a) &&
                  values_equal(mul_values(one, a), a),
              "scalar * identity");
      c.check(values_equal(mul_values(a, add_values(b, d)),
                           add_values(mul_values(a, b), mul_values(a, d))),
              "scalar left distributivity");
      c.check(values_equal(mul_values(add_values(a, b), d),
                           add_values(mul_values(a, d), mul_values(b, d))),
              "scalar right distributivity");
      c.check(is_zero_value(mul_values(a, zero)) &&
                  is_zero_value(mul_values(zero, a)),
              "scalar annihilation");
    }
  }

  // Nested dictionary/record values: additive monoid laws plus scalar
  // action distributivity, annihilation, and identity.
  for (int trials = 0; trials < 2600; ++trials) {
    ScalarKind leaf = rng.pick(all_semiring_kinds());
    TypePtr t = random_homogeneous_type(rng, 3, leaf);
    Value a = random_value(rng, t);
    Value b = random_value(rng, t);
    Value d = random_value(rng, t);
    Value zero = zero_of(t);
    c.check(values_equal(add_values(a, b), add_values(b, a)),
            "nested + commutativity");
    c.check(values_equal(add_values(add_values(a, b), d),
                         add_values(a, add_values(b, d))),
            "nested + associativity");
    c.check(values_equal(add_values(a, zero), a), "nested + identity");
    Value s = random_scalar(rng, leaf);
    c.check(values_equal(mul_values(s, add_values(a, b)),
                         add_values(mul_values(s, a), mul_values(s, b))),
            "scalar action distributivity");
    c.check(is_zero_value(mul_values(zero_of(scalar_type(leaf)), a)),
            "scalar action annihilation");
    c.check(values_equal(mul_values(one_of(leaf), a), a),
            "scalar action identity");
  }
}

// ---------------------------------------------------------------------------
// 3. Operational semantics on fuzzed well-typed closed terms.
// ---------------------------------------------------------------------------

void crit_semantics(Ctx& c) {
  Rng rng(seed_from_env(102));
  for (int i = 0; i < 1000; ++i) {
    ExprPtr raw = random_closed_expr(rng, 24);
    Typed t = typecheck(raw);
    Value big = eval(t.expr);
    ExprPtr curr = t.expr;
    size_t steps = 0;
    bool ok_det = true, ok_types = true, ok_term = true;
    while (!is_value_expr(curr)) {
      if (count_redexes(curr) != 1) ok_det = false;
      ExprPtr next = step(curr);
      if (!next) {
        ok_term = false;
        break;
      }
      if (!types_equal(t.type, typecheck(next).type)) ok_types = false;
      curr = next;
      if (++steps >= 100000) {
        ok_term = false;
        break;
      }
    }
    c.check(ok_det, "exactly one redex at every non-value step");
    c.check(ok_types, "every step preserves the type");
    c.check(ok_term, "evaluation terminates within the step budget");
    c.check(ok_term && values_equal(big, value_of_expr(curr)),
            "big-step equals the small-step normal form");
    c.check(ok_term && values_equal(big, run_small_step(t.expr)),
            "small-step driver is deterministic");
  }
}

// ---------------------------------------------------------------------------
// 4. Rewrite-rule soundness plus optimizer fixpoint on the golden suite.
// ---------------------------------------------------------------------------

void crit_rewrites(Ctx& c) {
  Rng rng(seed_from_env(103));
  struct RuleCase {
    const char* name;
    ExprPtr (*gen)(Rng&);
    ExprPtr (*apply)(const ExprPtr&, const TypeEnv*);
  };
  std::vector<RuleCase> rules = {
      {"vertical-key", rule_instance_vertical_key, fuse_vertical},
      {"vertical-value", rule_instance_vertical_value, fuse_vertical},
      {"horizontal", rule_instance_horizontal, fuse_horizontal},
      {"licm", rule_instance_licm, hoist_invariant},
      {"factorize-left", rule_instance_factorize_left, factorize},
      {"factorize-right", rule_instance_factorize_right, factorize},
      {"if-to-mul", rule_instance_if_to_mul, if_to_mul},
  };
  for (const auto& rule : rules) {
    size_t fired = 0;
    bool sound = true, fix_sound = true;
    for (int i = 0; i < 500; ++i) {
      ExprPtr lhs = typecheck(rule.gen(rng)).expr;
      Value before = eval(lhs);
      ExprPtr rhs = rule.apply(lhs, nullptr);
      if (!exprs_equal(lhs, rhs)) ++fired;
      if (!values_equal(before, eval(typecheck(rhs).expr))) sound = false;
      ExprPtr fix = optimize(lhs);
      if (!values_equal(before, eval(typecheck(fix).expr))) fix_sound = false;
    }
    c.check(sound, std::string(rule.name) + " preserves values");
    c.check(fix_sound, std::string(rule.name) + " fixpoint preserves values");
    c.check(fired > 250, std::string(rule.name) + " fires on its instances");
  }

  // Fixpoint preserves value and type on the golden program suite.
  std::vector<std::string> programs = {
      "let d = { \"a\" -> 2, \"b\" -> 3 } in sum(x <- d) x.val",
      "let d = { 1 -> 2.0, 2 -> 0.5 } in sum(x <- d) { x.key -> x.val } + d",
      "let M = { <r=0, c=0> -> 7.0, <r=0, c=3> -> 8.0, <r=1, c=1> -> 9.0 } in "
      "let V = { 0 -> 1.0, 2 -> 2.0, 3 -> 3.0 } in "
      "sum(x <- M) { x.key.r -> x.val * V(x.key.c) }",
      "let R = { 1 -> 10, 2 -> 20, 7 -> 70 } in "
      "let t = sum(r <- R) if (r.key <= 5) then { r.key -> r.val } in "
      "sum(z <- t) if (2 <= z.key) then { z.key -> z.val }",
      "let V1 = { 0 -> 1.0, 2 -> 2.0 } in let V2 = { 0 -> 3.0, 2 -> 5.0 } in "
      "let V3 = { 0 -> 7.0, 1 -> 4.0, 2 -> 11.0 } in "
      "let t = sum(x <- V1) { x.key -> x.val * V2(x.key) } in "
      "sum(z <- t) { z.key -> z.val * V3(z.key) }",
      "let R = { 1 -> 1, 4 -> 2 } in let a = 3 in "
      "sum(x <- R) let h = a + 1 in "
      "if (x.key <= 2) then { x.key -> h * x.val } else { }",
      "let p = 2 <= 3 in if (p) then 3.0 else 0.0",
  };
  for (const auto& src : programs) {
    Typed t = typecheck(parse(src));
    ExprPtr o = optimize(t.expr);
    Typed to = typecheck(o);
    c.check(types_equal(t.type, to.type), "fixpoint preserves type: " + src);
    c.check(values_equal(eval(t.expr), eval(to.expr)),
            "fixpoint preserves value: " + src);
    c.check(exprs_equal(o, optimize(o)), "fixpoint is stable: " + src);
  }
}

// ---------------------------------------------------------------------------
// 5. Frontend translations against brute-force oracles.
// ---------------------------------------------------------------------------

void crit_frontends(Ctx& c) {
  {
    Rng rng(seed_from_env(104));
    for (int i = 0; i < 1000; ++i) {
      RAWorld w = random_ra_world(rng);
      RAInstance inst = random_ra_query(rng);
      Value got = eval_bound(w.binds(), lower_ra(inst.q), w.hints());
      c.check(values_equal(got, ra_oracle(inst, w)),
              "relational case " + std::to_string(i));
    }
  }
  {
    Rng rng(seed_from_env(105));
    for (int i = 0; i < 300; ++i) {
      NRCInstance inst = random_nrc_instance(rng);
      c.check(values_equal(eval_bound({}, lower_nrc(inst.q)), inst.expected),
              "nested-collection case " + std::to_string(i));
    }
  }
  {
    Rng rng(seed_from_env(106));
    for (int i = 0; i < 300; ++i) {
      LAInstance inst = random_la_instance(rng);
      c.check(la_instance_ok(inst),
              "linear-algebra case " + std::to_string(i));
    }
  }
  {
    Rng rng(seed_from_env(107));
    for (int i = 0; i < 200; ++i) {
      JoinInstance inst = random_hash_join_instance(rng);
      c.check(values_equal(eval_bound(inst.binds, inst.built, inst.hints),
                           eval_bound(inst.binds, inst.oracle, inst.hints)),
              "hash-join case " + std::to_string(i));
    }
  }
  {
    Rng rng(seed_from_env(108));
    for (int i = 0; i < 200; ++i) {
      JoinInstance inst = random_groupjoin_instance(rng);
      c.check(values_equal(eval_bound(inst.binds, inst.built, inst.hints),
                           eval_bound(inst.binds, inst.oracle, inst.hints)),
              "groupjoin case " + std::to_string(i));
    }
  }
}

// ---------------------------------------------------------------------------
// 6. Asymptotic iteration counters on a seeded sparse 64x64 pair.
// ---------------------------------------------------------------------------

void crit_counters(Ctx& c) {
  Rng rng(seed_from_env(109));
  Mat A = random_dense_mat(rng, 64, 64, 0.05);
  Mat B = random_dense_mat(rng, 64, 64, 0.05);

  size_t nnz1 = mat_flat(A).entries().size();
  size_t nnz2 = mat_flat(B).entries().size();
  c.check(nnz1 > 0 && nnz2 > 0, "fixture matrices are non-empty");

  // Matrix-matrix product, flat vs curried.
  LAPtr q = la_op(LAExpr::Kind::MatMul, la_ref("A"), la_ref("B"));
  Binds flat = {{"A", mat_flat(A)}, {"B", mat_flat(B)}};
  Binds cur = {{"A", flat_to_curried(mat_flat(A))},
               {"B", flat_to_curried(mat_flat(B))}};
  TypeHints fh = {{"A", flat_mat_type()}, {"B", flat_mat_type()}};
  TypeHints ch = {{"A", curried_mat_type()}, {"B", curried_mat_type()}};
  EvalMetrics mf, mc;
  Value rf = eval_bound_metrics(flat, lower_la(q, LALayout::Flat), mf, fh);
  Value rc = eval_bound_metrics(cur, lower_la(q, LALayout::Curried), mc, ch);
  c.check(values_equal(rf, curried_to_flat(rc)),
          "flat and curried products agree");

  // Independently computed iteration formulas.
  std::vector<size_t> b_row_nnz(64, 0);
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j)
      if (B.a[i][j] != 0.0) ++b_row_nnz[i];
  size_t curried_expected = 0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j)
      if (A.a[i][j] != 0.0) curried_expected += b_row_nnz[j];
  c.check(mf.loop_iterations == nnz1 * nnz2,
          "flat product runs exactly nnz1*nnz2 iterations");
  c.check(mc.loop_iterations == curried_expected,
          "curried product matches its per-entry formula");
  c.check(10 * mc.loop_iterations < nnz1 * nnz2,
          "curried product is under 10% of the flat count");

  // Covariance (A^T A) over the curried layout: the two-pass transpose
  // program against its single-pass fusion.
  std::string unfused =
      "let At = sum(row <- A) sum(x <- row.val) "
      "{ x.key -> { row.key -> x.val } } in "
      "sum(row <- At) { row.key -> "
      "sum(x <- row.val) sum(y <- A(x.key)) { y.key -> x.val * y.val } }";
  std::string fused =
      "sum(row <- A) sum(x <- row.val) { x.key -> "
      "sum(y <- row.val) { y.key -> x.val * y.val } }";
  Binds ab = {{"A", flat_to_curried(mat_flat(A))}};
  TypeHints ah = {{"A", curried_mat_type()}};
  EvalMetrics mu, mfu;
  Value vu = eval_bound_metrics(ab, parse(unfused), mu, ah);
  Value vf = eval_bound_metrics(ab, parse(fused), mfu, ah);
  c.check(values_equal(vu, vf), "both covariance programs agree");

  // Dense oracle for the covariance value itself.
  {
    std::vector<std::pair<Value, Value>> outer;
    for (int i = 0; i < 64; ++i) {
      std::vector<std::pair<Value, Value>> inner;
      for (int j = 0; j < 64; ++j) {
        double s = 0.0;
        for (int r = 0; r < 64; ++r) s += A.a[r][i] * A.a[r][j];
        if (s != 0.0) inner.emplace_back(Value::integer(j), Value::real(s));
      }
      if (!inner.empty())
        outer.emplace_back(Value::integer(i), Value::dict(std::move(inner)));
    }
    c.check(values_equal(vf, Value::dict(std::move(outer))),
            "covariance matches the dense oracle");
  }

  size_t row_sq = 0;
  for (int r = 0; r < 64; ++r) {
    size_t nr = 0;
    for (int j = 0; j < 64; ++j)
      if (A.a[r][j] != 0.0) ++nr;
    row_sq += nr * nr;
  }
  c.check(mfu.loop_iterations == row_sq,
          "fused covariance matches sum of squared row counts");
  c.check(mu.loop_iterations == nnz1 + row_sq,
          "unfused covariance adds the transpose pass");
  c.check(mfu.loop_iterations < mu.loop_iterations,
          "fusion strictly reduces the iteration count");
}

// ---------------------------------------------------------------------------
// 7. Layout transparency on a 10,000-row relation.
// ---------------------------------------------------------------------------

void crit_layouts(Ctx& c) {
  Rng rng(seed_from_env(110));
  std::vector<std::pair<Value, Value>> es;
  es.reserve(10000);
  for (int i = 0; i < 10000; ++i) {
    Value row = Value::record({{"a", Value::integer(i % 100 + 1)},
                               {"b", Value::integer(i / 100 + 1)},
                               {"c", Value::integer(rng.range(1, 9))}});
    es.emplace_back(row, Value::integer(1));
  }
  Value bag = Value::dict(std::move(es));
  c.check(bag.entries().size() == 10000, "relation holds 10,000 rows");
  Value rows = bag_to_row_array(bag);
  Value cols = row_to_columnar(rows);

  std::vector<Frag> queries = {
      frag("r", "r.a * r.c"),
      frag("r", "{ r.a -> r.b * r.c }"),
      frag("r", "if (r.b <= 50) then { r.c -> r.a }"),
  };
  for (size_t qi = 0; qi < queries.size(); ++qi) {
    Value vd = eval_bound({{"Rel", bag}},
                          scan_rows("Rel", ScanLayout::Dict, queries[qi]));
    Value vr = eval_bound({{"Rel", rows}},
                          scan_rows("Rel", ScanLayout::Row, queries[qi]));
    Value vc = eval_bound(
        {{"Rel", cols}},
        scan_rows("Rel", ScanLayout::Columnar, queries[qi], {"a", "b", "c"}));
    std::string tag = "query " + std::to_string(qi + 1);
    c.check(dump_value(vd) == dump_value(vr), tag + ": dict vs row text");
    c.check(dump_value(vd) == dump_value(vc), tag + ": dict vs columnar text");
    c.check(values_equal(vd, vr) && values_equal(vd, vc),
            tag + ": canonical values agree");
  }
}

// ---------------------------------------------------------------------------
// 8. Gene-burden pipeline against a brute-force oracle.
// ---------------------------------------------------------------------------

void crit_gene_burden(Ctx& c) {
  Rng rng(seed_from_env(111));
  constexpr int kGenes = 20, kVariants = 100, kSamples = 10;

  struct GeneRow {
    std::string name;
    int64_t contig, start, end;
  };
  struct Genotype {
    std::string sample;
    double call;
    int64_t mult;
  };
  struct VariantRow {
    int64_t contig, start;
    std::string ref, alt;
    std::vector<Genotype> genotypes;
    int64_t mult;
  };

  std::vector<GeneRow> genes;
  for (int g = 0; g < kGenes; ++g) {
    int64_t start = rng.range(0, 1000);
    genes.push_back({"G" + std::to_string(g), rng.range(1, 3), start,
                     start + rng.range(100, 500)});
  }
  static const char* bases[] = {"A", "C", "G", "T"};
  std::vector<VariantRow> variants;
  for (int v = 0; v < kVariants; ++v) {
    VariantRow row{rng.range(1, 3), rng.range(0, 1500),
                   bases[rng.range(0, 3)], bases[rng.range(0, 3)],
                   {}, rng.range(1, 2)};
    for (int s = 0; s < kSamples; ++s)
      row.genotypes.push_back({"S" + std::to_string(s),
                               static_cast<double>(rng.range(0, 2)),
                               rng.range(1, 2)});
    variants.push_back(row);
  }

  // Encode the fixtures as the interpreter sees them.
  std::vector<std::pair<Value, Value>> ges;
  for (const auto& g : genes)
    ges.emplace_back(
        Value::record({{"name", Value::string(g.name)},
                       {"desc", Value::string("gene " + g.name)},
                       {"contig", Value::integer(g.contig)},
                       {"start", Value::integer(g.start)},
                       {"end", Value::integer(g.end)},
                       {"gid", Value::string("ID" + g.name)}}),
        Value::boolean(true));
  std::vector<std::pair<Value, Value>> ves;
  for (const auto& v : variants) {
    std::vector<std::pair<Value, Value>> calls;
    for (const auto& gt : v.genotypes)
      calls.emplace_back(Value::record({{"sample", Value::string(gt.sample)},
                                        {"call", Value::real(gt.call)}}),
                         Value::integer(gt.mult));
    ves.emplace_back(
        Value::record({{"contig", Value::integer(v.contig)},
                       {"start", Value::integer(v.start)},
                       {"reference", Value::string(v.ref)},
                       {"alternate", Value::string(v.alt)},
                       {"genotypes", Value::dict(std::move(calls))}}),
        Value::integer(v.mult));
  }

  Binds binds = {{"Genes", Value::dict(std::move(ges))},
                 {"Variants", Value::dict(std::move(ves))}};
  TypeHints hints = {
      {"Genes",
       parse_type("{<name: string, desc: string, contig: int, start: int, "
                  "end: int, gid: string> -> bool}")},
      {"Variants",
       parse_type("{<contig: int, start: int, reference: string, "
                  "alternate: string, genotypes: {<sample: string, "
                  "call: real> -> int}> -> int}")}};

  std::string pipeline =
      "let gv = sum(v <- Variants) sum(g <- Genes) "
      "  if (g.key.contig == v.key.contig && g.key.start <= v.key.start && "
      "      g.key.end >= v.key.start) then "
      "    sum(c <- v.key.genotypes) "
      "      { <sample = c.key.sample, gene = g.key.name, "
      "         burden = c.key.call> -> g.val * c.val * v.val } in "
      "let tmp = sum(x <- gv) "
      "  { x.key.sample -> { <gene = x.key.gene, burden = x.key.burden> "
      "                      -> x.val } } in "
      "sum(x <- tmp) { <sample = x.key, burdens = "
      "  let agg = sum(b <- x.val) { b.key.gene -> b.val * b.key.burden } in "
      "  sum(t <- agg) { <gene = t.key, burden = t.val> -> 1 } > -> 1 }";

  // Check the documented pipeline type before running it.
  {
    TypeEnv tenv;
    for (const auto& [n, t] : hints) tenv.bind(n, t);
    c.check(type_to_string(typecheck(tenv, parse(pipeline)).type) ==
                "{<sample: string, burdens: {<gene: string, burden: real> -> "
                "int}> -> int}",
            "pipeline output type golden");
  }

  Value got = eval_bound(binds, parse(pipeline), hints);

  // Brute-force oracle straight off the fixture rows: weighted per-sample,
  // per-gene call totals, with samples appearing whenever any variant that
  // carries them lands in a gene.
  std::map<std::string, std::map<std::string, double>> burden;
  std::set<std::string> present;
  for (const auto& v : variants)
    for (const auto& g : genes) {
      if (v.contig != g.contig || v.start < g.start || v.start > g.end)
        continue;
      for (const auto& gt : v.genotypes) {
        present.insert(gt.sample);
        burden[gt.sample][g.name] +=
            static_cast<double>(v.mult * gt.mult) * gt.call;
      }
    }
  std::vector<std::pair<Value, Value>> expected;
  for (const auto& sample : present) {
    std::vector<std::pair<Value, Value>> bag;
    for (const auto& [gene, total] : burden[sample])
      if (total != 0.0)
        bag.emplace_back(Value::record({{"gene", Value::string(gene)},
                                        {"burden", Value::real(total)}}),
                         Value::integer(1));
    expected.emplace_back(
        Value::record({{"sample", Value::string(sample)},
                       {"burdens", Value::dict(std::move(bag))}}),
        Value::integer(1));
  }
  c.check(!present.empty(), "some variants land inside genes");
  c.check(values_equal(got, Value::dict(std::move(expected))),
          "pipeline output matches the brute-force oracle");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    void (*fn)(Ctx&);
  };
  std::vector<Criterion> criteria = {
      {"golden-examples", 1.0, crit_goldens},
      {"semiring-laws", 30.0, crit_semiring_laws},
      {"operational-semantics", 60.0, crit_semantics},
      {"rewrite-soundness", 60.0, crit_rewrites},
      {"frontend-oracles", 60.0, crit_frontends},
      {"iteration-counters", 10.0, crit_counters},
      {"layout-transparency", 30.0, crit_layouts},
      {"gene-burden-pipeline", 10.0, crit_gene_burden},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto& cr = criteria[i];
    Ctx ctx;
    std::string crash;
    auto t0 = std::chrono::steady_clock::now();
    try {
      cr.fn(ctx);
    } catch (const SdqlError& e) {
      crash = std::string("unexpected error: ") + e.what();
    } catch (const std::exception& e) {
      crash = std::string("unexpected exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    bool in_budget = secs <= cr.limit_s;
    bool pass = crash.empty() && ctx.failed == 0 && in_budget;
    if (!pass) ++failures;
    std::printf("[%zu/8] %-22s %s  (%ld checks, %.2fs, limit %.0fs)\n", i + 1,
                cr.name, pass ? "PASS" : "FAIL", ctx.checks, secs,
                cr.limit_s);
    if (!crash.empty()) std::printf("      %s\n", crash.c_str());
    if (!in_budget) std::printf("      over time budget\n");
    for (const auto& n : ctx.notes)
      std::printf("      failed: %s\n", n.c_str());
    if (ctx.failed > static_cast<long>(ctx.notes.size()))
      std::printf("      ... and %ld more failed checks\n",
                  ctx.failed - static_cast<long>(ctx.notes.size()));
  }
  return failures == 0 ? 0 : 1;
}
