#pragma once

#include <span>
#include <vector>

#include "fman/connection.hpp"
#include "fman/model.hpp"

namespace fman {

/// Riemann tensor components at a point, convention
///   R^k_{sij} = d_i G^k_{js} - d_j G^k_{is} + G^k_{ir} G^r_{js} - G^k_{jr} G^r_{is},
/// antisymmetric in the last two slots.
struct RiemannAtPoint {
  std::vector<double> point;
  int n = 0;
  std::vector<double> r;  // ((k*n+s)*n+i)*n+j

  double at(int k, int s, int i, int j) const { return r[static_cast<std::size_t>(((k * n + s) * n + i) * n + j)]; }
  double& at(int k, int s, int i, int j) { return r[static_cast<std::size_t>(((k * n + s) * n + i) * n + j)]; }
  double max_abs() const;
};

RiemannAtPoint riemann_tensor(const ChristoffelJet& gamma);

/// Residuals of the curvature integrability identity in both coordinate forms
/// and both invariant basis forms; verdict on residuals normalized by
/// max|R| * max|c|.
Report check_3rc(const RiemannAtPoint& R, const ProductJet& prod, double tol);

/// Coefficient tensors of the formal cross-derivative of the symmetry system
/// in an adapted chart (unit = first coordinate direction, constant):
///   C^k_{ijs} = c^k_{jr} c^r_{is} - c^k_{ir} c^r_{js}
///   A^k_{ijs} = (d_i c^k_{js} - d_j c^k_{is}) - (c^k_{jr} G^r_{is} - c^k_{ir} G^r_{js})
///               - (G^k_{jr} c^r_{is} - G^k_{ir} c^r_{js})
///   B^k_{ijs} = -(c^k_{jr} d_1 G^r_{is} - c^k_{ir} d_1 G^r_{js}) - (d_i G^k_{js} - d_j G^k_{is})
///               + (G^k_{jr} G^r_{is} - G^k_{ir} G^r_{js})
/// with transverse indices i, j >= 2 (1-based).
struct ObstructionTensors {
  std::vector<double> point;
  int n = 0;
  std::vector<double> C, A, B;  // ((k*n+i)*n+j)*n+s

  double c_at(int k, int i, int j, int s) const { return C[static_cast<std::size_t>(((k * n + i) * n + j) * n + s)]; }
  double a_at(int k, int i, int j, int s) const { return A[static_cast<std::size_t>(((k * n + i) * n + j) * n + s)]; }
  double b_at(int k, int i, int j, int s) const { return B[static_cast<std::size_t>(((k * n + i) * n + j) * n + s)]; }
};

/// Requires an adapted chart (constant unit equal to the first basis vector)
/// and the natural connection at order >= 1.
ObstructionTensors obstruction_tensors(const FModel& m, const std::string& X, std::span<const double> point,
                                       int order);

}  // namespace fman
