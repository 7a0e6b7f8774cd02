#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sdql/ast.hpp"
#include "sdql/types.hpp"

namespace sdql {

// Typing context; shadowing allowed, lookup returns the innermost binding.
class TypeEnv {
public:
  void bind(std::string name, TypePtr t) {
    binds_.emplace_back(std::move(name), std::move(t));
  }
  void pop() { binds_.pop_back(); }

  const TypePtr* lookup(const std::string& name) const {
    for (auto it = binds_.rbegin(); it != binds_.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

private:
  std::vector<std::pair<std::string, TypePtr>> binds_;
};

struct Typed {
  ExprPtr expr;  // elaborated: promotions explicit, empty dictionaries and
                 // if-without-else resolved, sum nodes annotated
  TypePtr type;
};

// Typechecks and elaborates. Throws SdqlError (stage Type) on failure.
Typed typecheck(TypeEnv& env, const ExprPtr& e);
Typed typecheck(const ExprPtr& e);

} // namespace sdql
