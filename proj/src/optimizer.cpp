#include "sdql/optimizer.hpp"

#include <memory>
#include <sstream>

#include "sdql/errors.hpp"
#include "sdql/parser.hpp"

namespace sdql {

RewriteConfig RewriteConfig::from_list(const std::string& rules) {
  RewriteConfig c = none();
  std::stringstream ss(rules);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "vertical-key") c.vertical_key = true;
    else if (item == "vertical-value") c.vertical_value = true;
    else if (item == "vertical") c.vertical_key = c.vertical_value = true;
    else if (item == "horizontal") c.horizontal = true;
    else if (item == "factorize-left") c.factorize_left = true;
    else if (item == "factorize-right") c.factorize_right = true;
    else if (item == "factorize") c.factorize_left = c.factorize_right = true;
    else if (item == "licm") c.licm = true;
    else if (item == "if-to-mul") c.if_to_mul = true;
    else if (item == "all") c = RewriteConfig();
    else parse_error("unknown-rewrite-rule", item);
  }
  return c;
}

namespace {

// ---- syntactic helpers ----------------------------------------------------

bool is_field_of(const ExprPtr& e, const std::string& var, const std::string& f) {
  return e->kind == Expr::Kind::Field && e->name == f &&
         e->kids[0]->kind == Expr::Kind::Var && e->kids[0]->name == var;
}

size_t count_var(const ExprPtr& e, const std::string& n) {
  switch (e->kind) {
  case Expr::Kind::Var:
    return e->name == n ? 1 : 0;
  case Expr::Kind::Sum:
  case Expr::Kind::Let: {
    size_t c = count_var(e->kids[0], n);
    if (e->name != n) c += count_var(e->kids[1], n);
    return c;
  }
  default: {
    size_t c = 0;
    for (const auto& k : e->kids) c += count_var(k, n);
    return c;
  }
  }
}

// Every free occurrence of `var` sits directly under a `.f` projection.
bool uses_only_field(const ExprPtr& e, const std::string& var, const std::string& f) {
  if (is_field_of(e, var, f)) return true;
  if (e->kind == Expr::Kind::Var) return e->name != var;
  if (e->kind == Expr::Kind::Sum || e->kind == Expr::Kind::Let) {
    if (!uses_only_field(e->kids[0], var, f)) return false;
    return e->name == var || uses_only_field(e->kids[1], var, f);
  }
  for (const auto& k : e->kids)
    if (!uses_only_field(k, var, f)) return false;
  return true;
}

// Every free occurrence of `var` sits under some projection `var.f`.
bool uses_only_fields(const ExprPtr& e, const std::string& var) {
  if (e->kind == Expr::Kind::Field && e->kids[0]->kind == Expr::Kind::Var &&
      e->kids[0]->name == var)
    return true;
  if (e->kind == Expr::Kind::Var) return e->name != var;
  if (e->kind == Expr::Kind::Sum || e->kind == Expr::Kind::Let) {
    if (!uses_only_fields(e->kids[0], var)) return false;
    return e->name == var || uses_only_fields(e->kids[1], var);
  }
  for (const auto& k : e->kids)
    if (!uses_only_fields(k, var)) return false;
  return true;
}

// Capture-avoiding replacement of the projection `var.f` by `repl`.
ExprPtr subst_field(const ExprPtr& e, const std::string& var, const std::string& f,
                    const ExprPtr& repl) {
  if (is_field_of(e, var, f)) return repl;
  if (e->kind == Expr::Kind::Var || e->kind == Expr::Kind::Const ||
      e->kind == Expr::Kind::EmptyDict)
    return e;
  auto copy = std::make_shared<Expr>(*e);
  bool changed = false;
  if (e->kind == Expr::Kind::Sum || e->kind == Expr::Kind::Let) {
    copy->kids[0] = subst_field(e->kids[0], var, f, repl);
    changed = copy->kids[0] != e->kids[0];
    if (e->name != var && mentions_var(e->kids[1], var)) {
      ExprPtr body = e->kids[1];
      std::string bound = e->name;
      if (free_vars(repl).count(bound)) {
        std::string nv = fresh_var(bound, {repl, body});
        body = subst(body, bound, mk_var(nv));
        copy->name = nv;
      }
      copy->kids[1] = subst_field(body, var, f, repl);
      changed = changed || copy->kids[1] != e->kids[1] || copy->name != e->name;
    }
    return changed ? ExprPtr(copy) : e;
  }
  for (size_t i = 0; i < e->kids.size(); ++i) {
    copy->kids[i] = subst_field(e->kids[i], var, f, repl);
    changed = changed || copy->kids[i] != e->kids[i];
  }
  return changed ? ExprPtr(copy) : e;
}

// Strictness in var.val: does e reduce to a zero whenever var.val is a zero?
// Conservative syntactic analysis used by the value-mapping fusion guard.
bool strict_in_val(const ExprPtr& e, const std::string& var) {
  if (is_field_of(e, var, "val")) return true;
  switch (e->kind) {
  case Expr::Kind::Mul:
    return strict_in_val(e->kids[0], var) || strict_in_val(e->kids[1], var);
  case Expr::Kind::Promote:
    return strict_in_val(e->kids[0], var);
  case Expr::Kind::DictLit: {
    for (size_t i = 1; i < e->kids.size(); i += 2)
      if (!strict_in_val(e->kids[i], var)) return false;
    return e->kids.size() >= 2;
  }
  case Expr::Kind::Sum:
    if (e->name == var) return strict_in_val(e->kids[0], var);
    return strict_in_val(e->kids[0], var) || strict_in_val(e->kids[1], var);
  case Expr::Kind::Lookup:
  case Expr::Kind::Field:
    return strict_in_val(e->kids[0], var);
  default:
    return false;
  }
}

bool is_syntactic_zero(const ExprPtr& e) {
  if (e->kind == Expr::Kind::EmptyDict) return true;
  return e->kind == Expr::Kind::Const && is_zero_value(e->cval);
}

bool singleton_dict(const ExprPtr& e) {
  return e->kind == Expr::Kind::DictLit && e->kids.size() == 2;
}

// Left-nested multiplication chain as a factor list.
void mul_factors(const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (e->kind == Expr::Kind::Mul) {
    mul_factors(e->kids[0], out);
    out.push_back(e->kids[1]);
  } else {
    out.push_back(e);
  }
}

ExprPtr mul_fold(const std::vector<ExprPtr>& fs, size_t lo, size_t hi) {
  ExprPtr acc = fs[lo];
  for (size_t i = lo + 1; i < hi; ++i) acc = mk_mul(acc, fs[i]);
  return acc;
}

// Real division has no algebraic role, so no rule moves it around.
bool movable(const ExprPtr& e) { return !contains_kind(e, Expr::Kind::Div); }

// ---- the rewriter ---------------------------------------------------------

struct Rewriter {
  RewriteConfig cfg;
  TypeEnv env;
  int untyped = 0;  // >0 once we lost track of a binder's type
  std::vector<std::string>* explain = nullptr;
  bool changed = false;

  TypePtr type_of(const ExprPtr& e) {
    if (untyped) return nullptr;
    try {
      TypeEnv scratch = env;
      return typecheck(scratch, e).type;
    } catch (const SdqlError&) {
      return nullptr;
    }
  }

  void note(const char* rule, const ExprPtr& before, const ExprPtr& after) {
    changed = true;
    if (!explain) return;
    auto snip = [](const ExprPtr& x) {
      std::string s = pretty(x);
      if (s.size() > 120) s = s.substr(0, 117) + "...";
      return s;
    };
    explain->push_back(std::string(rule) + ": " + snip(before) + "  ==>  " + snip(after));
  }

  // Accepts a candidate when typing is unavailable or when it provably
  // preserves the subterm's type.
  bool type_preserving(const ExprPtr& before, const ExprPtr& after) {
    TypePtr t0 = type_of(before);
    if (!t0) return true;
    TypePtr t1 = type_of(after);
    return t1 && types_equal(t0, t1);
  }

  // --- if-to-mul: if (c) e1 else 0  ~>  promote(c) * e1 --------------------
  // An explicit promotion to the result's scalar kind keeps the product
  // well-typed; without typing information the bare condition is used.
  ExprPtr promoted_cond(const ExprPtr& c, const ExprPtr& target) {
    TypePtr ct = type_of(c);
    TypePtr tt = type_of(target);
    if (ct && tt && ct->is_scalar() && tt->is_scalar() &&
        ct->scalar != tt->scalar && scalar_subtype(ct->scalar, tt->scalar))
      return mk_promote(ct->scalar, tt->scalar, c);
    return c;
  }

  ExprPtr try_if_to_mul(const ExprPtr& e) {
    if (e->kids.size() != 3 || !is_syntactic_zero(e->kids[2])) return e;
    const ExprPtr& c = e->kids[0];
    const ExprPtr& e1 = e->kids[1];
    ExprPtr cand;
    if (singleton_dict(e1))
      cand = mk_dict({e1->kids[0], mk_mul(promoted_cond(c, e1->kids[1]), e1->kids[1])},
                     e1->dense);
    else
      cand = mk_mul(promoted_cond(c, e1), e1);
    if (!type_preserving(e, cand)) return e;
    note("if-to-mul", e, cand);
    return cand;
  }

  // --- vertical loop fusion ------------------------------------------------

  struct Producer {
    std::string x;
    ExprPtr src, key, val;
    bool key_map;  // { f(x.key) -> x.val } vs { x.key -> f(x.val) }
  };

  ExprPtr fuse_consumer(const ExprPtr& b, const std::string& y, const Producer& p,
                        bool* done) {
    if (b->kind == Expr::Kind::Sum && b->kids[0]->kind == Expr::Kind::Var &&
        b->kids[0]->name == y && singleton_dict(b->kids[1])) {
      const std::string& x2 = b->name;
      const ExprPtr& k2 = b->kids[1]->kids[0];
      const ExprPtr& v2 = b->kids[1]->kids[1];
      if (p.key_map && cfg.vertical_key) {
        if (is_field_of(v2, x2, "val") && uses_only_field(k2, x2, "key")) {
          ExprPtr key = subst_field(k2, x2, "key", p.key);
          ExprPtr fused = mk_sum(p.x, p.src,
                                 mk_dict({key, field_of(p.x, "val")}));
          *done = true;
          return fused;
        }
      } else if (!p.key_map && cfg.vertical_value) {
        // Since the producer keeps keys intact, the consumer's value may
        // depend on the key as well; it must still be strict in the value so
        // entries dropped as zeros contribute nothing after fusion.
        if (is_field_of(k2, x2, "key") && uses_only_fields(v2, x2) &&
            strict_in_val(v2, x2)) {
          ExprPtr val = subst_field(v2, x2, "val", p.val);
          val = subst_field(val, x2, "key", field_of(p.x, "key"));
          ExprPtr fused = mk_sum(p.x, p.src,
                                 mk_dict({field_of(p.x, "key"), val}));
          *done = true;
          return fused;
        }
      }
    }
    if (b->kind == Expr::Kind::Var || b->kind == Expr::Kind::Const ||
        b->kind == Expr::Kind::EmptyDict)
      return b;
    if ((b->kind == Expr::Kind::Sum || b->kind == Expr::Kind::Let) && b->name == y) {
      // the free y lives in the source position only
      auto copy = std::make_shared<Expr>(*b);
      copy->kids[0] = fuse_consumer(b->kids[0], y, p, done);
      return *done ? ExprPtr(copy) : b;
    }
    auto copy = std::make_shared<Expr>(*b);
    for (size_t i = 0; i < b->kids.size() && !*done; ++i)
      copy->kids[i] = fuse_consumer(b->kids[i], y, p, done);
    return *done ? ExprPtr(copy) : b;
  }

  ExprPtr try_vertical(const ExprPtr& e) {
    const ExprPtr& bound = e->kids[0];
    const ExprPtr& body = e->kids[1];
    if (bound->kind != Expr::Kind::Sum || !singleton_dict(bound->kids[1])) return e;
    if (count_var(body, e->name) != 1) return e;
    Producer p;
    p.x = bound->name;
    p.src = bound->kids[0];
    p.key = bound->kids[1]->kids[0];
    p.val = bound->kids[1]->kids[1];
    if (is_field_of(p.val, p.x, "val") && uses_only_field(p.key, p.x, "key") &&
        !is_field_of(p.key, p.x, "key")) {
      p.key_map = true;
    } else if (is_field_of(p.key, p.x, "key") && uses_only_fields(p.val, p.x)) {
      // key-preserving producer: the mapped value may read the key too
      p.key_map = false;
    } else {
      return e;
    }
    bool done = false;
    ExprPtr fused = fuse_consumer(body, e->name, p, &done);
    if (!done) return e;
    if (!type_preserving(e, fused)) return e;
    note(p.key_map ? "vertical-key" : "vertical-value", e, fused);
    return fused;
  }

  // --- horizontal loop fusion ----------------------------------------------
  ExprPtr try_horizontal(const ExprPtr& e) {
    if (!cfg.horizontal) return e;
    const std::string& y1 = e->name;
    const ExprPtr& s1 = e->kids[0];
    const ExprPtr& rest = e->kids[1];
    if (s1->kind != Expr::Kind::Sum || rest->kind != Expr::Kind::Let) return e;
    const std::string& y2 = rest->name;
    const ExprPtr& s2 = rest->kids[0];
    const ExprPtr& f3 = rest->kids[1];
    if (y1 == y2 || s2->kind != Expr::Kind::Sum) return e;
    if (!alpha_equal(s1->kids[0], s2->kids[0])) return e;
    if (mentions_var(s2, y1)) return e;
    std::string x = fresh_var(s1->name, {s1->kids[1], s2->kids[1], s1->kids[0]});
    ExprPtr f1 = subst(s1->kids[1], s1->name, mk_var(x));
    ExprPtr f2 = subst(s2->kids[1], s2->name, mk_var(x));
    std::string tmp = fresh_var("tmp", {f3, s1->kids[0]});
    ExprPtr fusedsum = mk_sum(x, s1->kids[0], mk_record({y1, y2}, {f1, f2}));
    ExprPtr newbody = subst(subst(f3, y1, field_of(tmp, y1)), y2, field_of(tmp, y2));
    ExprPtr cand = mk_let(tmp, fusedsum, newbody);
    if (!type_preserving(e, cand)) return e;
    note("horizontal", e, cand);
    return cand;
  }

  // --- loop-invariant code motion ------------------------------------------
  ExprPtr try_licm(const ExprPtr& e) {
    const ExprPtr& src = e->kids[0];
    const ExprPtr& body = e->kids[1];
    // commute a let out of a singleton dictionary value so the hoist below
    // can see it on a later pass
    if (singleton_dict(body) && body->kids[1]->kind == Expr::Kind::Let) {
      const ExprPtr& l = body->kids[1];
      if (!mentions_var(l->kids[0], e->name) && !mentions_var(body->kids[0], l->name) &&
          movable(l->kids[0])) {
        ExprPtr cand = mk_sum(
            e->name, src,
            mk_let(l->name, l->kids[0],
                   mk_dict({body->kids[0], l->kids[1]}, body->dense)),
            e->body_type);
        if (type_preserving(e, cand)) {
          note("licm", e, cand);
          return cand;
        }
      }
    }
    if (body->kind != Expr::Kind::Let) return e;
    const ExprPtr& a = body->kids[0];
    ExprPtr b = body->kids[1];
    std::string y = body->name;
    if (mentions_var(a, e->name) || !movable(a)) return e;
    if (y == e->name || free_vars(src).count(y)) {
      std::string ny = fresh_var(y, {src, a, b, mk_var(e->name)});
      b = subst(b, y, mk_var(ny));
      y = ny;
    }
    ExprPtr cand = mk_let(y, a, mk_sum(e->name, src, b, e->body_type));
    if (!type_preserving(e, cand)) return e;
    note("licm", e, cand);
    return cand;
  }

  // --- loop factorization --------------------------------------------------

  // Longest invariant prefix/suffix split of the multiplication chain.
  ExprPtr try_factorize(const ExprPtr& e) {
    const ExprPtr& src = e->kids[0];
    const ExprPtr& body = e->kids[1];
    const std::string& x = e->name;
    bool through_dict = singleton_dict(body);
    const ExprPtr& chain = through_dict ? body->kids[1] : body;
    if (chain->kind != Expr::Kind::Mul) return e;
    std::vector<ExprPtr> fs;
    mul_factors(chain, fs);
    size_t lo = 0, hi = fs.size();
    if (cfg.factorize_left)
      while (lo < hi - 1 && !mentions_var(fs[lo], x) && movable(fs[lo]) &&
             (!through_dict || is_scalar_expr(fs[lo])))
        ++lo;
    size_t lo2 = lo;
    if (cfg.factorize_right)
      while (hi - 1 > lo2 && !mentions_var(fs[hi - 1], x) && movable(fs[hi - 1]))
        --hi;
    if (lo == 0 && hi == fs.size()) return e;
    ExprPtr inner = mul_fold(fs, lo, hi);
    if (through_dict) inner = mk_dict({body->kids[0], inner}, body->dense);
    ExprPtr cand = mk_sum(x, src, inner);
    if (lo > 0) cand = mk_mul(mul_fold(fs, 0, lo), cand);
    if (hi < fs.size()) cand = mk_mul(cand, mul_fold(fs, hi, fs.size()));
    if (!type_preserving(e, cand)) return e;
    note(lo > 0 ? "factorize-left" : "factorize-right", e, cand);
    return cand;
  }

  // Left factors only cross a dictionary literal when they are scalars
  // (dictionary multiplication is positional); needs typing to decide.
  bool is_scalar_expr(const ExprPtr& e) {
    TypePtr t = type_of(e);
    return t && t->is_scalar();
  }

  // --- driver --------------------------------------------------------------

  ExprPtr apply_here(const ExprPtr& e) {
    switch (e->kind) {
    case Expr::Kind::If:
      return cfg.if_to_mul ? try_if_to_mul(e) : e;
    case Expr::Kind::Let: {
      ExprPtr r = e;
      if (cfg.vertical_key || cfg.vertical_value) r = try_vertical(r);
      if (r == e && r->kind == Expr::Kind::Let) r = try_horizontal(r);
      return r;
    }
    case Expr::Kind::Sum: {
      ExprPtr r = cfg.licm ? try_licm(e) : e;
      if (r == e && (cfg.factorize_left || cfg.factorize_right))
        r = try_factorize(r);
      return r;
    }
    default:
      return e;
    }
  }

  ExprPtr go(const ExprPtr& e) {
    if (e->kind == Expr::Kind::Var || e->kind == Expr::Kind::Const)
      return e;
    auto copy = std::make_shared<Expr>(*e);
    bool kid_changed = false;
    auto visit = [&](size_t i) {
      copy->kids[i] = go(e->kids[i]);
      kid_changed = kid_changed || copy->kids[i] != e->kids[i];
    };
    if (e->kind == Expr::Kind::Sum || e->kind == Expr::Kind::Let) {
      visit(0);
      TypePtr bt = type_of(copy->kids[0]);
      bool typed = bt && (e->kind == Expr::Kind::Let || bt->is_dict());
      if (typed) {
        env.bind(e->name, e->kind == Expr::Kind::Let
                              ? bt
                              : record_type({{"key", bt->key}, {"val", bt->val}}));
      } else {
        ++untyped;
      }
      visit(1);
      if (typed)
        env.pop();
      else
        --untyped;
    } else {
      for (size_t i = 0; i < e->kids.size(); ++i) visit(i);
    }
    ExprPtr cur = kid_changed ? ExprPtr(copy) : e;
    return apply_here(cur);
  }
};

ExprPtr run(const ExprPtr& e, RewriteConfig cfg, const TypeEnv* env,
            std::vector<std::string>* explain, int passes) {
  ExprPtr cur = e;
  for (int i = 0; i < passes; ++i) {
    Rewriter rw;
    rw.cfg = cfg;
    if (env) rw.env = *env;
    rw.explain = explain;
    ExprPtr next = rw.go(cur);
    if (!rw.changed) break;
    cur = next;
  }
  return cur;
}

} // namespace

ExprPtr fuse_vertical(const ExprPtr& e, const TypeEnv* env) {
  RewriteConfig c = RewriteConfig::none();
  c.vertical_key = c.vertical_value = true;
  return run(e, c, env, nullptr, 1);
}

ExprPtr if_to_mul(const ExprPtr& e, const TypeEnv* env) {
  RewriteConfig c = RewriteConfig::none();
  c.if_to_mul = true;
  return run(e, c, env, nullptr, 1);
}

ExprPtr fuse_horizontal(const ExprPtr& e, const TypeEnv* env) {
  RewriteConfig c = RewriteConfig::none();
  c.horizontal = true;
  return run(e, c, env, nullptr, 1);
}

ExprPtr factorize(const ExprPtr& e, const TypeEnv* env) {
  RewriteConfig c = RewriteConfig::none();
  c.factorize_left = c.factorize_right = true;
  return run(e, c, env, nullptr, 1);
}

ExprPtr hoist_invariant(const ExprPtr& e, const TypeEnv* env) {
  RewriteConfig c = RewriteConfig::none();
  c.licm = true;
  return run(e, c, env, nullptr, 1);
}

ExprPtr optimize(const ExprPtr& e, const RewriteConfig& cfg, const TypeEnv* env,
                 std::vector<std::string>* explain) {
  ExprPtr out = run(e, cfg, env, explain, cfg.max_passes < 1 ? 1 : cfg.max_passes);
  if (env) {
    // re-elaborate so the result carries the annotations evaluation needs
    try {
      TypeEnv scratch = *env;
      out = typecheck(scratch, out).expr;
    } catch (const SdqlError&) {
      // free variables or partial environments: hand back the syntactic form
    }
  }
  return out;
}

} // namespace sdql
