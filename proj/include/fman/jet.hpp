#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fman/error.hpp"

namespace fman {

/// Monomial bookkeeping for dense truncated polynomials in `nvars` variables
/// up to total degree `order`, laid out in graded-lexicographic order.
/// Instances are cached per (nvars, order) and shared.
struct MonomialTable {
  int nvars = 0;
  int order = 0;
  int count = 0;
  std::vector<std::uint8_t> exps;    // count * nvars exponents
  std::vector<std::uint8_t> degree;  // total degree per monomial
  std::vector<int> degree_offset;    // first index of each total degree, size order+2

  const std::uint8_t* mono(int idx) const { return exps.data() + static_cast<std::size_t>(idx) * nvars; }
  int index_of(const std::uint8_t* alpha) const;
  int count_up_to_degree(int d) const { return degree_offset[d + 1]; }

  static const MonomialTable& get(int nvars, int order);
};

/// Truncated multivariate Taylor expansion of a scalar at a base point.
/// Coefficients are stored densely against the shared MonomialTable.
/// Jets are immutable values; arithmetic requires matching nvars and order.
class Jet {
public:
  Jet() = default;
  Jet(int nvars, int order);

  static Jet constant(int nvars, int order, double v);
  /// The jet of coordinate i at base value `base`, i.e. base + x_i.
  static Jet variable(int nvars, int order, int i, double base);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(c_.size()); }
  const MonomialTable& table() const { return MonomialTable::get(nvars_, order_); }

  double value() const { return c_.empty() ? 0.0 : c_[0]; }
  double operator[](int idx) const { return c_[idx]; }
  double& raw(int idx) { return c_[idx]; }
  std::span<const double> coeffs() const { return c_; }

  /// Coefficient for an explicit multi-index (size nvars); 0 if degree exceeds order.
  double coeff(std::span<const int> alpha) const;

  Jet operator-() const;
  Jet operator+(const Jet& o) const;
  Jet operator-(const Jet& o) const;
  Jet operator*(const Jet& o) const;
  Jet operator/(const Jet& o) const;
  Jet operator+(double s) const;
  Jet operator-(double s) const;
  Jet operator*(double s) const;
  Jet operator/(double s) const;
  friend Jet operator+(double s, const Jet& j) { return j + s; }
  friend Jet operator-(double s, const Jet& j) { return (-j) + s; }
  friend Jet operator*(double s, const Jet& j) { return j * s; }
  friend Jet operator/(double s, const Jet& j);
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);

  /// Integer power by binary exponentiation; negative powers via division.
  Jet pow_int(int p) const;

  /// Same coefficients restricted to total degree <= new_order.
  Jet truncated(int new_order) const;

  /// Partial derivative in variable `var`; output order is order-1.
  Jet partial(int var) const;

  /// Taylor re-centering: the same polynomial expanded at base + offset,
  /// truncated to new_order.
  Jet shifted(std::span<const double> offset, int new_order) const;

  /// Substitute x_a -> sum_i L[a][i] y_i; result is a jet in the same
  /// number of variables and order.
  Jet compose_linear(const std::vector<std::vector<double>>& L) const;

  /// Polynomial evaluation at displacement dx from the base point.
  double eval(std::span<const double> dx) const;

  double max_abs() const;

private:
  void check_same_shape(const Jet& o) const;

  int nvars_ = 0;
  int order_ = 0;
  std::vector<double> c_;
};

enum class AnalyticFn { exp, log, sin, cos, sqrt };

/// Taylor composition f(a), computed from the univariate series of f at the
/// constant term of a and the nilpotent remainder.
Jet jet_apply_analytic(AnalyticFn f, const Jet& a);

Jet jet_exp(const Jet& a);
Jet jet_log(const Jet& a);
Jet jet_sin(const Jet& a);
Jet jet_cos(const Jet& a);
Jet jet_sqrt(const Jet& a);

/// Truncated power series in a single variable, coefficient c[k] of t^k.
struct UniSeries {
  std::vector<double> c;

  UniSeries() = default;
  explicit UniSeries(int order) : c(static_cast<std::size_t>(order) + 1, 0.0) {}
  explicit UniSeries(std::vector<double> coeffs) : c(std::move(coeffs)) {}

  int order() const { return static_cast<int>(c.size()) - 1; }
  double eval(double t) const;

  UniSeries truncated(int new_order) const;
  UniSeries derivative() const;
  /// Term-wise integration; output order is input order + 1.
  UniSeries antiderivative(double value_at_zero) const;

  UniSeries operator+(const UniSeries& o) const;
  UniSeries operator-(const UniSeries& o) const;
  UniSeries operator*(double s) const;

  /// The same series as a 1-variable jet (and back).
  Jet to_jet() const;
  static UniSeries from_jet(const Jet& j);
};

}  // namespace fman
