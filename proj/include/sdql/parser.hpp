#pragma once

#include <string>

#include "sdql/ast.hpp"

namespace sdql {

// Parses concrete SDQL syntax into an AST. Sugar (set literals, dom, range,
// array literals, &&/||, if without else) is desugared here; see README for
// the accepted grammar.
ExprPtr parse(const std::string& text);

// Parses a type expression, e.g. "{ <a: int> -> real }" or "[|real|]".
TypePtr parse_type(const std::string& text);

// Parses canonical value text back into a Value.
Value parse_value(const std::string& text);

// Prints an AST back to parseable source. parse(pretty(e)) is structurally
// equal to e for every parser-produced AST.
std::string pretty(const ExprPtr& e);

} // namespace sdql
