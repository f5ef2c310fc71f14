#pragma once

#include <cmath>
#include <vector>

#include "fman/jet.hpp"

namespace fman {

// Gaussian elimination over the truncated jet ring. The ring is local, so a
// matrix is invertible iff its constant part is; pivots are chosen by the
// magnitude of constant terms.

/// Solves M * X = B in place; M is n x n row-major, B is n x ncols row-major.
/// Returns X (n x ncols). Throws Errc::singular on a vanishing pivot.
inline std::vector<Jet> jet_solve(std::vector<Jet> M, std::vector<Jet> B, int n, int ncols) {
  if (n == 0) return {};
  auto m = [&](int r, int c) -> Jet& { return M[static_cast<std::size_t>(r * n + c)]; };
  auto b = [&](int r, int c) -> Jet& { return B[static_cast<std::size_t>(r * ncols + c)]; };
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m(r, col).value()) > std::abs(m(piv, col).value())) piv = r;
    if (std::abs(m(piv, col).value()) < 1e-14)
      throw Error(Errc::singular, "singular constant part in jet-ring linear solve");
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(m(piv, c), m(col, c));
      for (int c = 0; c < ncols; ++c) std::swap(b(piv, c), b(col, c));
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      if (m(r, col).max_abs() == 0.0) continue;
      Jet f = m(r, col) / m(col, col);
      for (int c = col; c < n; ++c) m(r, c) -= f * m(col, c);
      for (int c = 0; c < ncols; ++c) b(r, c) -= f * b(col, c);
    }
  }
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < ncols; ++c) b(r, c) = b(r, c) / m(r, r);
  return B;
}

/// Inverse of an n x n jet matrix (row-major).
inline std::vector<Jet> jet_matrix_inverse(const std::vector<Jet>& M, int n) {
  if (n == 0) return {};
  const int nv = M[0].nvars();
  const int ord = M[0].order();
  std::vector<Jet> I(static_cast<std::size_t>(n) * n, Jet(nv, ord));
  for (int i = 0; i < n; ++i) I[static_cast<std::size_t>(i * n + i)] = Jet::constant(nv, ord, 1.0);
  return jet_solve(M, std::move(I), n, n);
}

}  // namespace fman
