#pragma once

#include <string>
#include <vector>

#include "sdql/ast.hpp"
#include "sdql/typecheck.hpp"

namespace sdql {

// Which rewrite rules the driver may fire.
struct RewriteConfig {
  bool vertical_key = true;
  bool vertical_value = true;
  bool horizontal = true;
  bool factorize_left = true;
  bool factorize_right = true;
  bool licm = true;
  bool if_to_mul = true;
  int max_passes = 20;

  static RewriteConfig none() {
    RewriteConfig c;
    c.vertical_key = c.vertical_value = c.horizontal = false;
    c.factorize_left = c.factorize_right = c.licm = c.if_to_mul = false;
    return c;
  }
  // Parses a comma-separated rule list (the --rules flag); unknown names
  // raise a Parse-stage error.
  static RewriteConfig from_list(const std::string& rules);
};

// Single-pass, single-rule forms. All are purely syntactic with conservative
// guards; non-matching input comes back unchanged (possibly the same
// pointer). Guards that need types consult the optional environment and
// degrade by refusing the rewrite when typing is unavailable, except where
// the rule is type-agnostic.
ExprPtr fuse_vertical(const ExprPtr& e, const TypeEnv* env = nullptr);
ExprPtr if_to_mul(const ExprPtr& e, const TypeEnv* env = nullptr);
ExprPtr fuse_horizontal(const ExprPtr& e, const TypeEnv* env = nullptr);
ExprPtr factorize(const ExprPtr& e, const TypeEnv* env = nullptr);
ExprPtr hoist_invariant(const ExprPtr& e, const TypeEnv* env = nullptr);

// Fixpoint driver: per pass, normalizations first (if-to-mul), then vertical
// fusion, horizontal fusion, invariant hoisting, factorization; repeats
// until no rule fires or max_passes is reached. When an environment is
// given, the result is re-elaborated and each application is checked to
// preserve the type. `explain`, when given, receives one line per fired
// rule with before/after snippets.
ExprPtr optimize(const ExprPtr& e, const RewriteConfig& cfg = {},
                 const TypeEnv* env = nullptr,
                 std::vector<std::string>* explain = nullptr);

} // namespace sdql
