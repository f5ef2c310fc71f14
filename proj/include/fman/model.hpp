#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fman/expr.hpp"
#include "fman/jet.hpp"
#include "fman/report.hpp"

namespace fman {

/// One F-manifold chart: coordinate names, structure functions c^k_{ij} of
/// the product (missing entries read as zero), the unit field e, named vector
/// fields, and optional metric / scalar densities / one-variable data series.
/// Indices are 0-based in memory; the file format is 1-based.
struct FModel {
  std::string name;
  std::vector<std::string> coords;
  std::map<std::array<int, 3>, Expr> c;  // key (k,i,j)
  std::vector<Expr> e;
  std::map<std::string, std::vector<Expr>> fields;
  std::vector<std::vector<Expr>> metric;  // empty, or dim x dim
  std::map<std::string, Expr> densities;
  std::map<std::string, UniSeries> data_series;
  std::vector<double> base_point;  // defaults to the origin

  int dim() const { return static_cast<int>(coords.size()); }
  bool has_metric() const { return !metric.empty(); }

  const Expr* c_entry(int k, int i, int j) const;
  void set_c(int k, int i, int j, Expr expr);
  bool has_field(const std::string& fname) const { return fields.count(fname) != 0; }
  const std::vector<Expr>& field(const std::string& fname) const;

  /// Dimension consistency and declared-coordinate checks; throws on defect.
  void validate() const;
};

/// Pointwise jets of the product data at a base point.
struct ProductJet {
  std::vector<double> point;
  int order = 0;
  int n = 0;
  std::vector<Jet> c;  // n^3, index (k*n+i)*n+j
  std::vector<Jet> e;

  const Jet& cj(int k, int i, int j) const { return c[static_cast<std::size_t>((k * n + i) * n + j)]; }
  Jet& cj(int k, int i, int j) { return c[static_cast<std::size_t>((k * n + i) * n + j)]; }
};

ProductJet product_at(const FModel& m, std::span<const double> point, int order);

/// Jets of the components of a named field (or explicit component list).
std::vector<Jet> field_jets(const FModel& m, const std::string& fname, std::span<const double> point, int order);
std::vector<Jet> field_jets(const FModel& m, std::span<const Expr> comps, std::span<const double> point, int order);

/// Commutativity, associativity, unit and Hertling-Manin residuals at a point.
/// Needs order >= 1 (the Hertling-Manin tensor involves first derivatives).
Report check_algebra_axioms(const FModel& m, std::span<const double> point, int order, double tol);

struct CyclicityInfo {
  double det = 0.0;         // raw determinant of the frame matrix
  double det_scaled = 0.0;  // determinant after normalizing columns
  double sigma_min = 0.0;   // smallest singular value of the raw matrix
  bool cyclic = false;
  std::vector<double> frame;  // n*n column-major: e, Xe, X^2 e, ...
};

/// Frame e, X, X^{o2}, ..., X^{o(n-1)} at the point; cyclic iff the
/// column-normalized determinant stays above tol.
CyclicityInfo cyclicity_info(const FModel& m, const std::string& X, std::span<const double> point, double tol);
Report check_cyclic(const FModel& m, const std::string& X, std::span<const double> point, double tol);

/// Block product of truncated polynomial algebras: within block alpha,
/// d_i o d_j = d_{i+j-1} when i+j-1 <= m_alpha, else 0; unit is the first
/// direction of every block.
FModel make_dh_model(const std::vector<int>& block_sizes, std::vector<Expr> X_components);

/// Closed-form cyclicity predicate for block models with the given per-block
/// component values of X at a point.
bool dh_regular_nondegenerate(const std::vector<int>& block_sizes, std::span<const double> X_values);

/// Builtin charts: "twocomponent", "nonregular2d", "onedim", "dh-<m1>,<m2>,...".
FModel builtin_example(const std::string& bname);
std::vector<std::string> builtin_names();

/// Model file ingestion (TOML-style sections; see the CLI documentation).
FModel load_model(const std::string& path);
FModel parse_model(const std::string& text, const std::string& origin);

}  // namespace fman
