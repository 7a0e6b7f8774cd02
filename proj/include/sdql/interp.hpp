#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sdql/ast.hpp"
#include "sdql/value.hpp"

namespace sdql {

// Runtime environment; shadowing allowed, lookup returns the innermost
// binding.
class Environment {
public:
  void bind(std::string name, Value v) {
    binds_.emplace_back(std::move(name), std::move(v));
  }
  void pop() { binds_.pop_back(); }

  const Value* lookup(const std::string& name) const {
    for (auto it = binds_.rbegin(); it != binds_.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

private:
  std::vector<std::pair<std::string, Value>> binds_;
};

// Abstract cost counters. loop_iterations counts executions of innermost
// sum bodies (a perfectly nested sum-of-sums counts only the inner loop),
// which makes the counter line up with the intuitive trip count of the
// generated loop nest.
struct EvalMetrics {
  size_t loop_iterations = 0;
  size_t scalar_mults = 0;
  size_t dict_allocations = 0;
  size_t lookups = 0;
};

// Big-step evaluation of an elaborated term. Throws SdqlError (stage
// Runtime) on division by zero and semi-ring domain violations.
Value eval(Environment& env, const ExprPtr& e);
Value eval(const ExprPtr& e);
Value eval_with_metrics(Environment& env, const ExprPtr& e, EvalMetrics& m);

// One small-step reduction of a closed elaborated term, following
// left-to-right evaluation contexts; nullptr when e is already a value.
ExprPtr step(const ExprPtr& e);

// Number of redex positions reachable through the evaluation contexts.
// Determinism of the reduction relation shows up as a count of exactly one
// for every closed, well-typed non-value.
size_t count_redexes(const ExprPtr& e);

// Drives `step` to a value. `trace`, when given, receives the pretty-printed
// term after every step. Errors with "step-budget-exhausted" past max_steps.
Value run_small_step(const ExprPtr& e, size_t max_steps = 1000000,
                     std::vector<std::string>* trace = nullptr);

} // namespace sdql
