#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fman/model.hpp"

namespace fman {

/// Jet-valued Christoffel symbols of a torsionless connection at a point,
/// stored once per unordered lower pair.
struct ChristoffelJet {
  std::vector<double> point;
  int order = 0;
  int n = 0;
  std::vector<Jet> packed;  // i * n(n+1)/2 + pairIndex(j<=k)

  static int pair_index(int j, int k) {
    if (j > k) std::swap(j, k);
    return k * (k + 1) / 2 + j;
  }
  const Jet& g(int i, int j, int k) const {
    return packed[static_cast<std::size_t>(i * (n * (n + 1) / 2) + pair_index(j, k))];
  }
  Jet& g(int i, int j, int k) { return packed[static_cast<std::size_t>(i * (n * (n + 1) / 2) + pair_index(j, k))]; }

  double max_abs() const;
};

/// Covector seed for the counit; must pair to 1 with e at the base point.
/// Internally the seed is divided by theta·e(x) over jets so the pairing
/// holds identically to truncation order.
struct CounitChoice {
  std::vector<double> theta;
};

CounitChoice default_counit(const FModel& m, std::span<const double> point);

/// The antisymmetrization operator S |-> S(.,A.) - S(A.,.) restricted to
/// {S in S^2 V* (x) V : S(e,.) = 0}, assembled in an e-adapted frame. The
/// matrix acts identically on every value index, so only the scalar
/// P x P block is stored, P = n(n-1)/2.
struct MAOperator {
  int n = 0;
  int dropped = 0;                             // coordinate direction replaced by e
  std::vector<Jet> frame;                      // n x n column-major: e, then unit directions
  std::vector<Jet> coframe;                    // n x n row-major, inverse of frame
  std::vector<Jet> matrix;                     // P x P row-major scalar block
  std::vector<std::pair<int, int>> row_pairs;  // coordinate pairs i < j
  std::vector<std::pair<int, int>> col_pairs;  // frame pairs 1 <= a <= b <= n-1
  double condition = 0.0;                      // condition estimate of the constant part
};

/// A: n x n row-major jets of the endomorphism; e: jets of the unit field.
/// Throws Errc::not_cyclic when the constant part of the block is singular.
MAOperator assemble_MA(const std::vector<Jet>& A, const std::vector<Jet>& e_jets);

/// The unique torsionless connection with flat unit and d(X o) = 0, computed
/// to jet order `order` at the point. Optional seeds: the counit covector and
/// a constant symmetric auxiliary Christoffel table (n^3, index (i*n+j)*n+k);
/// the result is independent of both choices up to roundoff.
ChristoffelJet build_natural_connection(const FModel& m, const std::string& X, std::span<const double> point,
                                        int order, std::optional<CounitChoice> counit = std::nullopt,
                                        const std::vector<double>* aux_gamma = nullptr);

/// Residuals of the defining and derived identities: flat unit, d(X o)=0,
/// full symmetry of the covariant derivative of the product, radiality of X,
/// vanishing of T on the unit, covariant associativity and the covariant
/// Hertling-Manin identity on basis tuples.
Report check_connection_axioms(const ChristoffelJet& gamma, const FModel& m, const std::string& X,
                               std::span<const double> point, double tol);

}  // namespace fman
