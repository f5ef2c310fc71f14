#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fman/jet.hpp"

namespace fman {

/// Immutable expression tree over real constants, named coordinates, the four
/// arithmetic operations, literal integer powers and the analytic functions
/// exp, log, sin, cos, sqrt. Expr values share nodes and are cheap to copy.
class Expr {
public:
  enum class Kind { constant, coord, neg, add, sub, mul, div, pow, call };

  struct Node {
    Kind kind;
    double value = 0.0;        // constant
    std::string name;          // coord
    int exponent = 0;          // pow
    AnalyticFn fn = AnalyticFn::exp;  // call
    std::shared_ptr<const Node> a, b;
    SourceSpan span;
  };

  Expr() = default;

  static Expr constant(double v);
  static Expr coord(std::string name);
  static Expr neg(Expr a);
  static Expr add(Expr a, Expr b);
  static Expr sub(Expr a, Expr b);
  static Expr mul(Expr a, Expr b);
  static Expr div(Expr a, Expr b);
  static Expr pow(Expr a, int exponent);
  static Expr call(AnalyticFn fn, Expr a);

  Expr operator+(const Expr& o) const { return add(*this, o); }
  Expr operator-(const Expr& o) const { return sub(*this, o); }
  Expr operator*(const Expr& o) const { return mul(*this, o); }
  Expr operator/(const Expr& o) const { return div(*this, o); }
  Expr operator-() const { return neg(*this); }

  bool empty() const { return node_ == nullptr; }
  const Node& node() const { return *node_; }

  /// Names of all coordinates referenced by the expression.
  std::vector<std::string> coordinates() const;

  /// True when no coordinate reference occurs anywhere in the tree.
  bool is_constant() const;

  /// Truncated Taylor expansion at `point` to total degree `order`;
  /// coordinate i evaluates to the jet point[i] + x_i.
  Jet eval_jet(std::span<const std::string> coords, std::span<const double> point, int order) const;

  /// Plain double evaluation, independent of the jet machinery.
  double eval(std::span<const std::string> coords, std::span<const double> point) const;

  /// Canonical textual form; parse(to_string()) reproduces the same string.
  std::string to_string() const;

private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses the expression grammar
///   expr := term (("+"|"-") term)* ;  term := factor (("*"|"/") factor)* ;
///   factor := base ("^" sint)? ;      base := number | ident | ident "(" expr ")" | "(" expr ")" | "-" base
/// with ^ binding tighter than unary minus, left-associative binaries, and
/// the exponent a literal (possibly negative) integer. Whitespace-insensitive;
/// scientific notation accepted for constants.
Expr parse_expression(const std::string& text);

/// Replaces coordinate i by sum_j matrix[i][j]*coords[j] + offset[i], so the
/// result evaluated at y equals the original evaluated at matrix*y + offset.
Expr substitute_linear(const Expr& e, std::span<const std::string> coords,
                       const std::vector<std::vector<double>>& matrix, std::span<const double> offset);

const char* analytic_fn_name(AnalyticFn f);

}  // namespace fman
