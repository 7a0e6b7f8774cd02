#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "gen.hpp"
#include "sdql/dataio.hpp"
#include "sdql/errors.hpp"
#include "sdql/frontends.hpp"
#include "sdql/interp.hpp"
#include "sdql/parser.hpp"
#include "sdql/typecheck.hpp"

using namespace sdql;
using sdqlgen::Rng;
using sdqlgen::seed_from_env;

namespace {

std::string expected_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const SdqlError& e) {
    return e.code();
  }
  return "";
}

Schema genes_schema(Schema::Semantics sem) {
  return Schema{{{"name", ScalarKind::String},
                 {"desc", ScalarKind::String},
                 {"contig", ScalarKind::Int},
                 {"start", ScalarKind::Int},
                 {"end", ScalarKind::Int},
                 {"gid", ScalarKind::String}},
                sem};
}

const char* kGenesCsv =
    "name,desc,contig,start,end,gid\n"
    "NOTCH2,notch receptor 2,1,119911553,120100779,ENSG00000134250\n"
    "BRCA1,DNA repair associate,17,43044295,43170245,ENSG00000012048\n"
    "TP53,tumor protein p53,17,7565097,7590856,ENSG00000141510\n";

} // namespace

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

TEST_CASE("a relation CSV loads as a set of row records") {
  Value v = parse_csv(kGenesCsv, genes_schema(Schema::Semantics::Set));
  REQUIRE(v.entries().size() == 3);
  CHECK(dump_value(v.entries()[0].first) ==
        "<name=\"BRCA1\", desc=\"DNA repair associate\", contig=17, "
        "start=43044295, end=43170245, gid=\"ENSG00000012048\">");
  CHECK(v.entries()[0].second.as_bool());

  // Loader output is canonical: keys arrive sorted and rebuilding the
  // dictionary from its own entries changes nothing.
  CHECK(values_equal(Value::dict(v.entries()), v));
}

TEST_CASE("row-array semantics keeps file order under dense indices") {
  Value v = parse_csv(kGenesCsv, genes_schema(Schema::Semantics::Row));
  REQUIRE(v.entries().size() == 3);
  CHECK(v.dense());
  CHECK(dump_value(*v.entries()[0].second.field("name")) == "\"NOTCH2\"");
  CHECK(dump_value(*v.entries()[1].second.field("name")) == "\"BRCA1\"");
  CHECK(dump_value(*v.entries()[2].second.field("name")) == "\"TP53\"");
  CHECK(dump_value(v.entries()[2].first) == "2");
}

TEST_CASE("columnar semantics turns the file into a record of dense columns") {
  Value v = parse_csv(kGenesCsv, genes_schema(Schema::Semantics::Columnar));
  REQUIRE(v.fields().size() == 6);
  CHECK(dump_value(*v.field("contig")) == "{ 0 -> 1, 1 -> 17, 2 -> 17 }");
  CHECK(v.field("name")->dense());
}

TEST_CASE("bag semantics counts duplicates that set semantics collapses") {
  const char* csv = "a,b\n1,x\n1,x\n2,y\n";
  Schema s{{{"a", ScalarKind::Int}, {"b", ScalarKind::String}},
           Schema::Semantics::Bag};
  CHECK(dump_value(parse_csv(csv, s)) ==
        "{ <a=1, b=\"x\"> -> 2, <a=2, b=\"y\"> -> 1 }");
  s.semantics = Schema::Semantics::Set;
  CHECK(dump_value(parse_csv(csv, s)) ==
        "{ <a=1, b=\"x\"> -> true, <a=2, b=\"y\"> -> true }");
}

TEST_CASE("quoted cells carry separators, escaped quotes, and newlines") {
  const char* csv =
      "a,b\n"
      "\"x,y\",1\n"
      "\"he said \"\"hi\"\"\",2\n"
      "\"two\nlines\",3\n";
  Schema s{{{"a", ScalarKind::String}, {"b", ScalarKind::Int}},
           Schema::Semantics::Bag};
  Value v = parse_csv(csv, s);
  REQUIRE(v.entries().size() == 3);
  CHECK(dump_value(*v.entries()[0].first.field("a")) == "\"he said \\\"hi\\\"\"");
  CHECK(dump_value(*v.entries()[1].first.field("a")) == "\"two\nlines\"");
  CHECK(dump_value(*v.entries()[2].first.field("a")) == "\"x,y\"");
}

TEST_CASE("an empty CSV body yields the schema's empty value") {
  Schema s{{{"a", ScalarKind::Int}}, Schema::Semantics::Set};
  CHECK(dump_value(parse_csv("", s)) == "{ }");
  CHECK(dump_value(parse_csv("a\n", s)) == "{ }");
  s.semantics = Schema::Semantics::Columnar;
  CHECK(dump_value(parse_csv("a\n", s)) == "<a={ }>");
}

TEST_CASE("CSV shape problems carry error codes and line numbers") {
  Schema s{{{"a", ScalarKind::Int}, {"b", ScalarKind::Int}},
           Schema::Semantics::Set};
  CHECK(expected_error([&] { parse_csv("a,c\n1,2\n", s); }) ==
        "csv-header-mismatch");
  CHECK(expected_error([&] { parse_csv("a\n1\n", s); }) == "csv-header-mismatch");
  CHECK(expected_error([&] { parse_csv("a,b\n1,2,3\n", s); }) ==
        "csv-arity-mismatch");
  try {
    parse_csv("a,b\n1,2\n1,oops\n", s);
    CHECK(false);
  } catch (const SdqlError& e) {
    CHECK(e.code() == "csv-cell-parse");
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(e.stage() == ErrorStage::Runtime);
  }
}

TEST_CASE("schema value types match the four layout encodings") {
  Schema s{{{"a", ScalarKind::Int}, {"b", ScalarKind::Real}},
           Schema::Semantics::Set};
  CHECK(type_to_string(s.value_type()) == "{<a: int, b: real> -> bool}");
  s.semantics = Schema::Semantics::Bag;
  CHECK(type_to_string(s.value_type()) == "{<a: int, b: real> -> int}");
  s.semantics = Schema::Semantics::Row;
  CHECK(type_to_string(s.value_type()) == "[|<a: int, b: real>|]");
  s.semantics = Schema::Semantics::Columnar;
  CHECK(type_to_string(s.value_type()) == "<a: [|int|], b: [|real|]>");
}

TEST_CASE("a bag load followed by a count aggregate recovers the row count") {
  Rng rng(seed_from_env(41));
  for (int i = 0; i < 50; ++i) {
    int n = static_cast<int>(rng.range(0, 20));
    std::string csv = "a,b\n";
    for (int j = 0; j < n; ++j) {
      csv += std::to_string(rng.range(0, 3));
      csv += ',';
      csv += std::to_string(rng.range(0, 3));
      csv += '\n';
    }
    Schema s{{{"a", ScalarKind::Int}, {"b", ScalarKind::Int}},
             Schema::Semantics::Bag};
    Value bag = parse_csv(csv, s);
    TypeEnv tenv;
    tenv.bind("B", s.value_type());
    Typed t = typecheck(tenv, parse("sum(x <- B) x.val"));
    Environment venv;
    venv.bind("B", bag);
    CHECK(eval(venv, t.expr).as_int() == n);
    // Loaded values are canonical and survive printing.
    CHECK(values_equal(parse_value(dump_value(bag)), bag));
  }
}

// ---------------------------------------------------------------------------
// COO matrices
// ---------------------------------------------------------------------------

TEST_CASE("COO triples load into flat, curried, and dense encodings") {
  const char* coo = "0 0 7\n0 3 8\n1 1 9\n";
  CHECK(dump_value(parse_coo_matrix(coo, MatrixLayout::Flat)) ==
        "{ <row=0, col=0> -> 7.0, <row=0, col=3> -> 8.0, <row=1, col=1> -> 9.0 }");
  CHECK(dump_value(parse_coo_matrix(coo, MatrixLayout::Curried)) ==
        "{ 0 -> { 0 -> 7.0, 3 -> 8.0 }, 1 -> { 1 -> 9.0 } }");
  std::string dense = std::string("2 4\n") + coo;
  CHECK(dump_value(parse_coo_matrix(dense, MatrixLayout::Dense)) ==
        "{ 0 -> { 0 -> 7.0, 3 -> 8.0 }, 1 -> { 1 -> 9.0 } }");
  CHECK(parse_coo_matrix(dense, MatrixLayout::Dense).dense());
}

TEST_CASE("zero-valued triples vanish from every layout") {
  const char* coo = "0 0 7\n0 1 0\n1 1 9\n";
  Value flat = parse_coo_matrix(coo, MatrixLayout::Flat);
  CHECK(flat.entries().size() == 2);
  Value cur = parse_coo_matrix(coo, MatrixLayout::Curried);
  CHECK(dump_value(cur) == "{ 0 -> { 0 -> 7.0 }, 1 -> { 1 -> 9.0 } }");
}

TEST_CASE("COO shape problems carry error codes") {
  CHECK(expected_error([] {
          parse_coo_matrix("0 -1 3\n", MatrixLayout::Flat);
        }) == "coo-negative-index");
  CHECK(expected_error([] {
          parse_coo_matrix("0 0 1\n0 0 2\n", MatrixLayout::Flat);
        }) == "coo-duplicate-coordinate");
  CHECK(expected_error([] {
          parse_coo_matrix("0 0 1\n", MatrixLayout::Dense);
        }) == "coo-dense-needs-header");
  CHECK(expected_error([] {
          parse_coo_matrix("0 0\n1 1 2\n2 2 3\n", MatrixLayout::Flat);
        }) == "coo-index-out-of-bounds");  // first line reads as a 0x0 header
  CHECK(expected_error([] {
          parse_coo_matrix("1 2 3 4\n", MatrixLayout::Flat);
        }) == "coo-bad-line");
  CHECK(expected_error([] {
          parse_coo_matrix("2 2\n2 0 1\n", MatrixLayout::Flat);
        }) == "coo-index-out-of-bounds");
}

TEST_CASE("flat and curried loads of one file stay convertible") {
  Rng rng(seed_from_env(42));
  for (int i = 0; i < 50; ++i) {
    std::string coo;
    int nr = static_cast<int>(rng.range(1, 6));
    int nc = static_cast<int>(rng.range(1, 6));
    for (int r = 0; r < nr; ++r)
      for (int c = 0; c < nc; ++c)
        if (rng.chance(0.3)) {
          coo += std::to_string(r) + " " + std::to_string(c) + " " +
                 std::to_string(0.5 * static_cast<double>(rng.range(1, 8))) + "\n";
        }
    Value flat = parse_coo_matrix(coo, MatrixLayout::Flat);
    Value cur = parse_coo_matrix(coo, MatrixLayout::Curried);
    CHECK(values_equal(flat_to_curried(flat), cur));
    CHECK(values_equal(curried_to_flat(cur), flat));
  }
}

// ---------------------------------------------------------------------------
// Line-oriented nested rows
// ---------------------------------------------------------------------------

TEST_CASE("nested row files parse one record literal per line into a bag") {
  const char* text =
      "<contig = 17, start = 43093817, genotypes = { <sample = \"s1\", call = 1.0> -> 1 }>\n"
      "\n"
      "<contig = 1, start = 119967501, genotypes = { <sample = \"s2\", call = 2.0> -> 1 }>\n";
  Value v = parse_rows(text);
  REQUIRE(v.entries().size() == 2);
  CHECK(v.entries()[0].first.field("contig")->as_int() == 1);
  CHECK(dump_value(*v.entries()[1].first.field("genotypes")) ==
        "{ <sample=\"s1\", call=1.0> -> 1 }");

  // Duplicate lines accumulate multiplicity.
  CHECK(dump_value(parse_rows("<a=1>\n<a=1>\n")) == "{ <a=1> -> 2 }");
}

TEST_CASE("loaders read from files and report missing paths") {
  std::string path = "/tmp/sdql_dataio_test.csv";
  {
    std::ofstream out(path);
    out << "a,b\n1,2\n";
  }
  Schema s{{{"a", ScalarKind::Int}, {"b", ScalarKind::Int}},
           Schema::Semantics::Set};
  CHECK(dump_value(load_csv(path, s)) == "{ <a=1, b=2> -> true }");
  std::remove(path.c_str());
  CHECK(expected_error([&] { load_csv(path, s); }) == "cannot-open-file");

  std::string mpath = "/tmp/sdql_dataio_test.coo";
  {
    std::ofstream out(mpath);
    out << "0 0 7\n";
  }
  CHECK(dump_value(load_coo_matrix(mpath, MatrixLayout::Flat)) ==
        "{ <row=0, col=0> -> 7.0 }");
  std::remove(mpath.c_str());
  CHECK(expected_error([&] { load_rows(mpath); }) == "cannot-open-file");
}
