#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdql/dataio.hpp"
#include "sdql/errors.hpp"
#include "sdql/interp.hpp"
#include "sdql/optimizer.hpp"
#include "sdql/parser.hpp"
#include "sdql/typecheck.hpp"

using namespace sdql;

namespace {

int exit_code(ErrorStage stage) {
  switch (stage) {
  case ErrorStage::Parse: return 2;
  case ErrorStage::Type: return 3;
  case ErrorStage::Runtime: return 4;
  case ErrorStage::Internal: return 5;
  }
  return 5;
}

const char* stage_name(ErrorStage stage) {
  switch (stage) {
  case ErrorStage::Parse: return "parse";
  case ErrorStage::Type: return "type";
  case ErrorStage::Runtime: return "runtime";
  case ErrorStage::Internal: return "internal";
  }
  return "internal";
}

struct Session {
  TypeEnv types;
  Environment values;
  RewriteConfig rules = RewriteConfig::none();
  bool do_optimize = false;
  bool typecheck_only = false;
  bool emit_ast = false;
  bool trace_steps = false;
  bool metrics = false;
  bool explain = false;
};

std::vector<std::string> split(const std::string& s, char sep, size_t max_parts) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (out.size() + 1 < max_parts) {
    size_t next = s.find(sep, pos);
    if (next == std::string::npos) break;
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
  out.push_back(s.substr(pos));
  return out;
}

ScalarKind parse_kind(const std::string& name) {
  auto k = scalar_kind_by_name(name == "double" ? "real" : name);
  if (!k) parse_error("unknown-scalar-type", name);
  return *k;
}

Schema::Semantics parse_semantics(const std::string& s) {
  if (s == "set") return Schema::Semantics::Set;
  if (s == "bag") return Schema::Semantics::Bag;
  if (s == "row") return Schema::Semantics::Row;
  if (s == "columnar") return Schema::Semantics::Columnar;
  parse_error("unknown-csv-semantics", s);
}

// --load NAME=PATH:FORMAT[:...]; formats:
//   csv:set|bag|row|columnar:a=int,b=string,...
//   coo:flat|curried|dense
//   rows
void do_load(Session& ss, const std::string& spec,
             const std::map<std::string, std::string>& layout_override) {
  size_t eq = spec.find('=');
  if (eq == std::string::npos)
    parse_error("bad-load-spec", "expected name=path:format[:...]");
  std::string name = spec.substr(0, eq);
  std::vector<std::string> parts = split(spec.substr(eq + 1), ':', 4);
  if (parts.size() < 2) parse_error("bad-load-spec", spec);
  const std::string& path = parts[0];
  const std::string& format = parts[1];
  Value v;
  TypePtr t;
  if (format == "csv") {
    if (parts.size() < 4) parse_error("bad-load-spec", "csv needs semantics and schema");
    Schema schema;
    std::string sem = parts[2];
    auto ov = layout_override.find(name);
    if (ov != layout_override.end())
      sem = ov->second == "dict" ? "bag" : ov->second;
    schema.semantics = parse_semantics(sem);
    for (const auto& col : split(parts[3], ',', 64)) {
      size_t ceq = col.find('=');
      if (ceq == std::string::npos)
        parse_error("bad-load-spec", "schema column '" + col + "'");
      schema.attrs.emplace_back(col.substr(0, ceq), parse_kind(col.substr(ceq + 1)));
    }
    v = load_csv(path, schema);
    t = schema.value_type();
  } else if (format == "coo") {
    if (parts.size() < 3) parse_error("bad-load-spec", "coo needs a layout");
    MatrixLayout ml;
    if (parts[2] == "flat") ml = MatrixLayout::Flat;
    else if (parts[2] == "curried") ml = MatrixLayout::Curried;
    else if (parts[2] == "dense") ml = MatrixLayout::Dense;
    else parse_error("unknown-coo-layout", parts[2]);
    v = load_coo_matrix(path, ml);
    t = infer_value_type(v);
    if (!t) {
      TypePtr cell = real_type();
      TypePtr key = record_type({{"row", int_type()}, {"col", int_type()}});
      if (ml == MatrixLayout::Flat) t = dict_type(key, cell);
      else t = dict_type(int_type(), dict_type(int_type(), cell));
    }
  } else if (format == "rows") {
    v = load_rows(path);
    t = infer_value_type(v);
    if (!t)
      runtime_error("cannot-infer-loaded-type",
                    name + ": empty rows input has no type");
  } else {
    parse_error("unknown-load-format", format);
  }
  ss.types.bind(name, t);
  ss.values.bind(name, v);
}

void run_expr(Session& ss, const ExprPtr& ast) {
  Typed typed = typecheck(ss.types, ast);
  if (ss.typecheck_only) {
    std::cout << type_to_string(typed.type) << "\n";
    return;
  }
  ExprPtr prog = typed.expr;
  if (ss.do_optimize) {
    std::vector<std::string> log;
    prog = optimize(prog, ss.rules, &ss.types, ss.explain ? &log : nullptr);
    for (const auto& line : log) std::cerr << line << "\n";
  }
  if (ss.emit_ast) {
    std::cout << pretty(prog) << "\n";
    return;
  }
  if (ss.trace_steps) {
    // the small-step machine runs closed terms: inline the session bindings
    // (free variables become constants)
    ExprPtr closed = prog;
    for (const auto& fv : free_vars(closed)) {
      const Value* v = ss.values.lookup(fv);
      const TypePtr* t = ss.types.lookup(fv);
      if (v) closed = subst(closed, fv, mk_const(*v, t ? *t : nullptr));
    }
    std::vector<std::string> trace;
    Value out = run_small_step(closed, 1000000, &trace);
    for (const auto& line : trace) std::cerr << line << "\n";
    std::cout << dump_value(out) << "\n";
    return;
  }
  if (ss.metrics) {
    EvalMetrics m;
    Value out = eval_with_metrics(ss.values, prog, m);
    std::cout << dump_value(out) << "\n";
    std::cerr << "loop_iterations=" << m.loop_iterations
              << " scalar_mults=" << m.scalar_mults
              << " dict_allocations=" << m.dict_allocations
              << " lookups=" << m.lookups << "\n";
    return;
  }
  std::cout << dump_value(eval(ss.values, prog)) << "\n";
}

// Top-level `let NAME = expr` (without a body) persists into the session.
bool try_repl_let(Session& ss, const std::string& line) {
  size_t i = 0;
  auto skip_ws = [&] { while (i < line.size() && isspace((unsigned char)line[i])) ++i; };
  skip_ws();
  if (line.compare(i, 3, "let") != 0) return false;
  i += 3;
  if (i >= line.size() || !isspace((unsigned char)line[i])) return false;
  skip_ws();
  size_t start = i;
  while (i < line.size() && (isalnum((unsigned char)line[i]) || line[i] == '_')) ++i;
  std::string name = line.substr(start, i - start);
  skip_ws();
  if (name.empty() || i >= line.size() || line[i] != '=') return false;
  std::string rhs = line.substr(i + 1);
  ExprPtr ast;
  try {
    ast = parse(rhs);
  } catch (const SdqlError&) {
    return false;  // probably a full let-in expression; parse it whole
  }
  Typed typed = typecheck(ss.types, ast);
  Value v = eval(ss.values, typed.expr);
  ss.types.bind(name, typed.type);
  ss.values.bind(name, v);
  std::cout << name << " : " << type_to_string(typed.type) << "\n";
  return true;
}

void repl(Session& ss) {
  std::string line;
  std::cout << "sdql> " << std::flush;
  while (std::getline(std::cin, line)) {
    try {
      std::string trimmed = line;
      while (!trimmed.empty() && isspace((unsigned char)trimmed.front()))
        trimmed.erase(trimmed.begin());
      if (trimmed.empty()) {
      } else if (trimmed == ":q") {
        return;
      } else if (trimmed.rfind(":t ", 0) == 0) {
        Typed t = typecheck(ss.types, parse(trimmed.substr(3)));
        std::cout << type_to_string(t.type) << "\n";
      } else if (trimmed.rfind(":opt ", 0) == 0) {
        Typed t = typecheck(ss.types, parse(trimmed.substr(5)));
        std::cout << pretty(optimize(t.expr, RewriteConfig(), &ss.types)) << "\n";
      } else if (!try_repl_let(ss, trimmed)) {
        Typed t = typecheck(ss.types, parse(trimmed));
        std::cout << dump_value(eval(ss.values, t.expr)) << "\n";
      }
    } catch (const SdqlError& e) {
      std::cout << stage_name(e.stage()) << " error: " << e.what() << "\n";
    }
    std::cout << "sdql> " << std::flush;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDQL interpreter"};
  std::vector<std::string> loads;
  std::vector<std::string> layouts;
  std::string rules;
  std::string expr_text;
  std::string file;
  Session ss;
  bool opt_flag = false;
  app.add_option("file", file, "program file to run");
  app.add_option("-e,--expr", expr_text, "program text to run");
  app.add_option("--load", loads,
                 "bind a relation: NAME=PATH:csv:set|bag|row|columnar:a=int,... "
                 "| NAME=PATH:coo:flat|curried|dense | NAME=PATH:rows");
  app.add_option("--layout", layouts,
                 "override a loaded relation's layout: NAME=dict|row|columnar");
  app.add_option("--rules", rules,
                 "enable rewrite rules (comma list or 'all')");
  app.add_flag("-O,--optimize", opt_flag, "enable all rewrite rules");
  app.add_flag("--typecheck", ss.typecheck_only, "print the type and stop");
  app.add_flag("--emit-ast", ss.emit_ast, "print the (optimized) program and stop");
  app.add_flag("--trace-steps", ss.trace_steps,
               "evaluate with the small-step machine, tracing to stderr");
  app.add_flag("--metrics", ss.metrics, "report abstract cost counters on stderr");
  app.add_flag("--explain", ss.explain, "print fired rewrite rules on stderr");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!rules.empty()) {
      ss.rules = RewriteConfig::from_list(rules);
      ss.do_optimize = true;
    }
    if (opt_flag) {
      ss.rules = RewriteConfig();
      ss.do_optimize = true;
    }
    std::map<std::string, std::string> layout_override;
    for (const auto& l : layouts) {
      size_t eq = l.find('=');
      if (eq == std::string::npos)
        parse_error("bad-layout-spec", "expected NAME=dict|row|columnar");
      layout_override[l.substr(0, eq)] = l.substr(eq + 1);
    }
    for (const auto& spec : loads) do_load(ss, spec, layout_override);

    if (!expr_text.empty()) {
      run_expr(ss, parse(expr_text));
    } else if (!file.empty()) {
      run_expr(ss, parse(read_file(file)));
    } else {
      repl(ss);
    }
  } catch (const SdqlError& e) {
    std::cerr << stage_name(e.stage()) << " error: " << e.what() << "\n";
    return exit_code(e.stage());
  }
  return 0;
}
