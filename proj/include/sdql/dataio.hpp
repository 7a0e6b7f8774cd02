#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sdql/types.hpp"
#include "sdql/value.hpp"

namespace sdql {

// Relation schema for CSV ingestion.
struct Schema {
  enum class Semantics { Set, Bag, Row, Columnar };

  std::vector<std::pair<std::string, ScalarKind>> attrs;
  Semantics semantics = Semantics::Set;

  TypePtr row_type() const;
  // The type of the loaded value under the chosen semantics.
  TypePtr value_type() const;
};

// CSV dialect: comma separator, double-quote escaping ("" for a literal
// quote), first line is a header that must match the schema names in order.
// Set semantics collapses duplicate rows silently; bag semantics counts them.
Value load_csv(const std::string& path, const Schema& schema);
Value parse_csv(const std::string& text, const Schema& schema);

enum class MatrixLayout { Flat, Curried, Dense };

// Whitespace-separated 0-based `row col value` triples, one per line. A
// `rows cols` header line (two fields) is optional for flat/curried and
// required for dense. Zero-valued triples vanish (implicit zeros); a
// repeated coordinate is an error.
Value load_coo_matrix(const std::string& path, MatrixLayout layout);
Value parse_coo_matrix(const std::string& text, MatrixLayout layout);

// Line-oriented nested input: every non-empty line is one SDQL record
// literal (e.g. `<a = 1, b = { "x" -> 2 }>`); the result is the bag mapping
// each row to its multiplicity.
Value load_rows(const std::string& path);
Value parse_rows(const std::string& text);

std::string read_file(const std::string& path);

} // namespace sdql
