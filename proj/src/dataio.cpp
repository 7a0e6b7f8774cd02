#include "sdql/dataio.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "sdql/errors.hpp"
#include "sdql/parser.hpp"

namespace sdql {

TypePtr Schema::row_type() const {
  std::vector<std::pair<std::string, TypePtr>> fields;
  for (const auto& [name, kind] : attrs)
    fields.emplace_back(name, scalar_type(kind));
  return record_type(std::move(fields));
}

TypePtr Schema::value_type() const {
  switch (semantics) {
  case Semantics::Set:
    return set_type(row_type());
  case Semantics::Bag:
    return dict_type(row_type(), int_type());
  case Semantics::Row:
    return array_type(row_type());
  case Semantics::Columnar: {
    std::vector<std::pair<std::string, TypePtr>> fields;
    for (const auto& [name, kind] : attrs)
      fields.emplace_back(name, array_type(scalar_type(kind)));
    return record_type(std::move(fields));
  }
  }
  internal_error("unhandled-schema-semantics", "value_type");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) runtime_error("cannot-open-file", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

// One CSV record; handles quoted fields and embedded separators/newlines.
bool next_csv_row(const std::string& text, size_t& pos, std::vector<std::string>& out,
                  int& lineno) {
  out.clear();
  if (pos >= text.size()) return false;
  ++lineno;
  std::string cell;
  bool quoted = false;
  for (;; ++pos) {
    if (pos >= text.size()) {
      out.push_back(cell);
      return true;
    }
    char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          cell += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
        if (c == '\n') ++lineno;
      }
    } else if (c == '"' && cell.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (c == '\n') {
      ++pos;
      out.push_back(cell);
      return true;
    } else if (c != '\r') {
      cell += c;
    }
  }
}

Value parse_cell(const std::string& cell, ScalarKind kind, int lineno) {
  try {
    switch (kind) {
    case ScalarKind::Bool:
      if (cell == "true") return Value::boolean(true);
      if (cell == "false") return Value::boolean(false);
      break;
    case ScalarKind::Int:
    case ScalarKind::Nat: {
      size_t used = 0;
      int64_t n = std::stoll(cell, &used);
      if (used == cell.size()) {
        Value v = Value::integer(n, kind);
        check_scalar_domain(kind, v);
        return v;
      }
      break;
    }
    case ScalarKind::String:
      return Value::string(cell);
    default: {
      size_t used = 0;
      double d = std::stod(cell, &used);
      if (used == cell.size()) {
        Value v = Value::real(d, kind);
        check_scalar_domain(kind, v);
        return v;
      }
      break;
    }
    }
  } catch (const std::invalid_argument&) {
  } catch (const std::out_of_range&) {
  }
  runtime_error("csv-cell-parse",
                "line " + std::to_string(lineno) + ": cannot read '" + cell +
                    "' as " + scalar_kind_name(kind));
}

} // namespace

Value parse_csv(const std::string& text, const Schema& schema) {
  size_t pos = 0;
  int lineno = 0;
  std::vector<std::string> cells;
  if (!next_csv_row(text, pos, cells, lineno)) {
    if (schema.semantics == Schema::Semantics::Columnar) {
      std::vector<std::pair<std::string, Value>> cols;
      for (const auto& [name, kind] : schema.attrs)
        cols.emplace_back(name, Value::empty_dict(true));
      return Value::record(std::move(cols));
    }
    return Value::empty_dict(schema.semantics == Schema::Semantics::Row);
  }
  if (cells.size() != schema.attrs.size())
    runtime_error("csv-header-mismatch", "wrong column count in header");
  for (size_t i = 0; i < cells.size(); ++i)
    if (cells[i] != schema.attrs[i].first)
      runtime_error("csv-header-mismatch",
                    "header column '" + cells[i] + "' vs schema '" +
                        schema.attrs[i].first + "'");

  std::vector<Value> rows;
  while (next_csv_row(text, pos, cells, lineno)) {
    if (cells.size() == 1 && cells[0].empty()) continue;  // trailing blank line
    if (cells.size() != schema.attrs.size())
      runtime_error("csv-arity-mismatch",
                    "line " + std::to_string(lineno) + ": got " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(schema.attrs.size()));
    std::vector<std::pair<std::string, Value>> fields;
    for (size_t i = 0; i < cells.size(); ++i)
      fields.emplace_back(schema.attrs[i].first,
                          parse_cell(cells[i], schema.attrs[i].second, lineno));
    rows.push_back(Value::record(std::move(fields)));
  }

  switch (schema.semantics) {
  case Schema::Semantics::Set: {
    std::vector<std::pair<Value, Value>> kvs;
    for (auto& r : rows) kvs.emplace_back(std::move(r), Value::boolean(true));
    return Value::dict(std::move(kvs));
  }
  case Schema::Semantics::Bag: {
    std::vector<std::pair<Value, Value>> kvs;
    for (auto& r : rows) kvs.emplace_back(std::move(r), Value::integer(1));
    return Value::dict(std::move(kvs));
  }
  case Schema::Semantics::Row: {
    std::vector<std::pair<Value, Value>> kvs;
    for (size_t i = 0; i < rows.size(); ++i)
      kvs.emplace_back(Value::integer(static_cast<int64_t>(i)), std::move(rows[i]));
    return Value::dict(std::move(kvs), true);
  }
  case Schema::Semantics::Columnar: {
    std::vector<std::pair<std::string, Value>> cols;
    for (const auto& [name, kind] : schema.attrs) {
      std::vector<std::pair<Value, Value>> col;
      for (size_t i = 0; i < rows.size(); ++i)
        col.emplace_back(Value::integer(static_cast<int64_t>(i)),
                         *rows[i].field(name));
      cols.emplace_back(name, Value::dict(std::move(col), true));
    }
    return Value::record(std::move(cols));
  }
  }
  internal_error("unhandled-schema-semantics", "parse_csv");
}

Value load_csv(const std::string& path, const Schema& schema) {
  return parse_csv(read_file(path), schema);
}

Value parse_coo_matrix(const std::string& text, MatrixLayout layout) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_dims = false;
  int64_t rows = 0, cols = 0;
  struct Triple {
    int64_t r, c;
    double v;
  };
  std::vector<Triple> triples;
  std::map<std::pair<int64_t, int64_t>, bool> seen;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() == 2 && triples.empty() && !have_dims) {
      rows = std::atoll(tok[0].c_str());
      cols = std::atoll(tok[1].c_str());
      have_dims = true;
      continue;
    }
    if (tok.size() != 3)
      runtime_error("coo-bad-line",
                    "line " + std::to_string(lineno) + ": expected 'row col value'");
    Triple tr{std::atoll(tok[0].c_str()), std::atoll(tok[1].c_str()),
              std::atof(tok[2].c_str())};
    if (tr.r < 0 || tr.c < 0)
      runtime_error("coo-negative-index", "line " + std::to_string(lineno));
    if (have_dims && (tr.r >= rows || tr.c >= cols))
      runtime_error("coo-index-out-of-bounds", "line " + std::to_string(lineno));
    if (!seen.emplace(std::make_pair(tr.r, tr.c), true).second)
      runtime_error("coo-duplicate-coordinate",
                    "line " + std::to_string(lineno) + ": (" +
                        std::to_string(tr.r) + ", " + std::to_string(tr.c) + ")");
    triples.push_back(tr);
  }

  switch (layout) {
  case MatrixLayout::Flat: {
    std::vector<std::pair<Value, Value>> kvs;
    for (const auto& t : triples)
      kvs.emplace_back(Value::record({{"row", Value::integer(t.r)},
                                      {"col", Value::integer(t.c)}}),
                       Value::real(t.v));
    return Value::dict(std::move(kvs));
  }
  case MatrixLayout::Curried: {
    std::map<int64_t, std::vector<std::pair<Value, Value>>> by_row;
    for (const auto& t : triples)
      by_row[t.r].emplace_back(Value::integer(t.c), Value::real(t.v));
    std::vector<std::pair<Value, Value>> kvs;
    for (auto& [r, inner] : by_row)
      kvs.emplace_back(Value::integer(r), Value::dict(std::move(inner)));
    return Value::dict(std::move(kvs));
  }
  case MatrixLayout::Dense: {
    if (!have_dims)
      runtime_error("coo-dense-needs-header", "give a 'rows cols' first line");
    std::map<int64_t, std::vector<std::pair<Value, Value>>> by_row;
    for (const auto& t : triples)
      by_row[t.r].emplace_back(Value::integer(t.c), Value::real(t.v));
    std::vector<std::pair<Value, Value>> kvs;
    for (int64_t r = 0; r < rows; ++r) {
      auto it = by_row.find(r);
      Value rowv = it == by_row.end() ? Value::empty_dict(true)
                                      : Value::dict(std::move(it->second), true);
      kvs.emplace_back(Value::integer(r), rowv);
    }
    return Value::dict(std::move(kvs), true);
  }
  }
  internal_error("unhandled-matrix-layout", "parse_coo_matrix");
}

Value load_coo_matrix(const std::string& path, MatrixLayout layout) {
  return parse_coo_matrix(read_file(path), layout);
}

Value parse_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<Value, Value>> kvs;
  while (std::getline(in, line)) {
    bool blank = true;
    for (char c : line)
      if (!isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) continue;
    kvs.emplace_back(parse_value(line), Value::integer(1));
  }
  return Value::dict(std::move(kvs));
}

Value load_rows(const std::string& path) { return parse_rows(read_file(path)); }

} // namespace sdql
