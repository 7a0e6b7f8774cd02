#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sdql/ast.hpp"
#include "sdql/value.hpp"

namespace sdql {

// A query fragment: an expression over one bound variable.
struct Frag {
  std::string var;
  ExprPtr body;

  bool empty() const { return !body; }
};
ExprPtr apply_frag(const Frag& f, const ExprPtr& arg);

// A fragment over two bound variables (join combiners).
struct Frag2 {
  std::string var1, var2;
  ExprPtr body;
};
ExprPtr apply_frag(const Frag2& f, const ExprPtr& a1, const ExprPtr& a2);

// ---- relational algebra (set semantics) -----------------------------------

struct RAExpr;
using RAPtr = std::shared_ptr<const RAExpr>;

struct RAExpr {
  enum class Kind {
    Scan,        // named relation { row -> bool }
    Select,      // pred over the row
    Project,     // fn over the row, record-valued
    Union,
    Intersect,
    Difference,
    Product,
    Join,        // theta over the concatenated row
    GroupAgg,    // keys (may be empty => scalar aggregate), fn over the row
  };
  Kind kind;
  std::string name;    // Scan
  TypePtr row_type;    // Scan
  Frag pred, fn, keys;
  RAPtr left, right;
};

RAPtr ra_scan(std::string name, TypePtr row_type);
RAPtr ra_select(Frag pred, RAPtr in);
RAPtr ra_project(Frag fn, RAPtr in);
RAPtr ra_union(RAPtr l, RAPtr r);
RAPtr ra_intersect(RAPtr l, RAPtr r);
RAPtr ra_difference(RAPtr l, RAPtr r);
RAPtr ra_product(RAPtr l, RAPtr r);
RAPtr ra_join(Frag theta, RAPtr l, RAPtr r);
RAPtr ra_groupagg(Frag keys, Frag fn, RAPtr in);

// Row (record) type produced by a query; checks schema validity, e.g.
// disjoint field names under Product.
TypePtr ra_schema(const RAPtr& q);

ExprPtr lower_ra(const RAPtr& q);

// ---- NRC+ (bag semantics) -------------------------------------------------

struct NRCExpr;
using NRCPtr = std::shared_ptr<const NRCExpr>;

struct NRCExpr {
  enum class Kind {
    Var,         // named bag
    Raw,         // embedded expression of bag type
    Let,
    Empty,       // empty bag of elements of type elem
    Sng,         // singleton bag of the element expression
    Flatten,
    ForUnion,    // for x in e1 union e2
    BagUnion,
    BagProduct,
    SumBy,       // keys empty => scalar aggregate
    GroupBy,
  };
  Kind kind;
  std::string name;  // Var / Let / ForUnion binder
  ExprPtr raw;       // Raw / Sng element
  TypePtr elem;      // Empty
  Frag keys, fn;     // SumBy / GroupBy
  NRCPtr e1, e2;
};

NRCPtr nrc_var(std::string name);
NRCPtr nrc_raw(ExprPtr e);
NRCPtr nrc_let(std::string name, NRCPtr bound, NRCPtr body);
NRCPtr nrc_empty(TypePtr elem);
NRCPtr nrc_sng(ExprPtr elem);
NRCPtr nrc_flatten(NRCPtr e);
NRCPtr nrc_for(std::string var, NRCPtr src, NRCPtr body);
NRCPtr nrc_union(NRCPtr l, NRCPtr r);
NRCPtr nrc_product(NRCPtr l, NRCPtr r);
NRCPtr nrc_sum_by(Frag keys, Frag fn, NRCPtr e);
NRCPtr nrc_group_by(Frag keys, NRCPtr e);

ExprPtr lower_nrc(const NRCPtr& q);

// ---- linear algebra -------------------------------------------------------

enum class LALayout { Flat, Curried };

struct LAExpr;
using LAPtr = std::shared_ptr<const LAExpr>;

struct LAExpr {
  enum class Kind {
    Ref,      // named tensor
    Scalar,   // embedded scalar expression
    VecAdd,
    ScalarVec,
    VecHadamard,
    VecDot,
    VecSum,
    MatTranspose,
    MatAdd,
    ScalarMat,
    MatHadamard,
    MatMul,
    MatVec,
    Trace,
  };
  Kind kind;
  std::string name;
  ExprPtr scalar;
  LAPtr l, r;
};

LAPtr la_ref(std::string name);
LAPtr la_scalar(ExprPtr e);
LAPtr la_op(LAExpr::Kind kind, LAPtr l, LAPtr r = nullptr);

ExprPtr lower_la(const LAPtr& q, LALayout layout);

// ---- physical join builders -----------------------------------------------

// Fused build-probe equality join: builds a partition dictionary over
// `right`, then probes it while scanning `left`. part_l/part_r run over the
// row (the key of a bag/set entry); combine runs over the two rows and
// yields the output key. Multiplicities multiply.
ExprPtr build_hash_join(ExprPtr left, ExprPtr right, Frag part_l, Frag part_r,
                        Frag2 combine);

// Per-key aggregate join: pre-aggregates g over `right` per partition key,
// then multiplies f into it while scanning `left`. f and g run over whole
// entries (record with key/val) and must be scalar-semiring-valued.
ExprPtr build_groupjoin(ExprPtr left, ExprPtr right, Frag part, Frag f, Frag g);

// ---- layout conversions ---------------------------------------------------

Value flat_to_curried(const Value& m);
Value curried_to_flat(const Value& m, const std::string& row_field = "row",
                      const std::string& col_field = "col");

// Bag relation <-> nested-dictionary (trie) encoding under the given
// attribute order (defaults to the record field order of the rows).
Value bag_to_factorized(const Value& rel, std::vector<std::string> order = {});
Value factorized_to_bag(const Value& v, const std::vector<std::string>& order);

// Duplicate-free bag <-> dense row array; errors on multiplicity > 1.
Value bag_to_row_array(const Value& rel);
Value row_array_to_bag(const Value& rows);

Value row_to_columnar(const Value& rows);
Value columnar_to_row(const Value& cols);

// ---- layout-transparent row scans -----------------------------------------

enum class ScanLayout { Dict, Row, Columnar };

// Builds the sum of `body` (a fragment over the row record) across a
// relation bound to the free variable `rel`, weighted by multiplicity under
// the dictionary layout. Under the columnar layout, row fields become
// indexed lookups into the column arrays named by `attrs` (which must list
// the schema in order).
ExprPtr scan_rows(const std::string& rel, ScanLayout layout, const Frag& body,
                  const std::vector<std::string>& attrs = {});

} // namespace sdql
