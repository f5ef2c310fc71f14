#include "fman/connection.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "jet_linalg.hpp"

namespace fman {

double ChristoffelJet::max_abs() const {
  double v = 0.0;
  for (const auto& j : packed) v = std::max(v, j.max_abs());
  return v;
}

CounitChoice default_counit(const FModel& m, std::span<const double> point) {
  const int n = m.dim();
  std::vector<double> ev(static_cast<std::size_t>(n));
  double norm2 = 0.0;
  for (int i = 0; i < n; ++i) {
    ev[static_cast<std::size_t>(i)] = m.e[static_cast<std::size_t>(i)].eval(m.coords, point);
    norm2 += ev[static_cast<std::size_t>(i)] * ev[static_cast<std::size_t>(i)];
  }
  if (norm2 == 0.0) throw Error(Errc::invalid, "unit field vanishes at the base point");
  for (auto& v : ev) v /= norm2;
  return CounitChoice{std::move(ev)};
}

MAOperator assemble_MA(const std::vector<Jet>& A, const std::vector<Jet>& e_jets) {
  const int n = static_cast<int>(e_jets.size());
  if (static_cast<int>(A.size()) != n * n) throw Error(Errc::shape, "endomorphism must be n x n");
  const int nv = e_jets[0].nvars();
  const int ord = e_jets[0].order();

  MAOperator op;
  op.n = n;
  const int P = n * (n - 1) / 2;

  // frame: e first, then unit coordinate directions with the largest
  // |e component| dropped
  int dropped = 0;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    double v = std::abs(e_jets[static_cast<std::size_t>(i)].value());
    if (v > best) {
      best = v;
      dropped = i;
    }
  }
  op.dropped = dropped;
  op.frame.assign(static_cast<std::size_t>(n) * n, Jet(nv, ord));
  auto fr = [&](int row, int col) -> Jet& { return op.frame[static_cast<std::size_t>(col * n + row)]; };
  for (int i = 0; i < n; ++i) fr(i, 0) = e_jets[static_cast<std::size_t>(i)];
  {
    int col = 1;
    for (int i = 0; i < n; ++i) {
      if (i == dropped) continue;
      fr(i, col) = Jet::constant(nv, ord, 1.0);
      ++col;
    }
  }
  // coframe rows phi^a = (frame^-1) rows
  {
    std::vector<Jet> fm(static_cast<std::size_t>(n) * n, Jet(nv, ord));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) fm[static_cast<std::size_t>(r * n + c)] = fr(r, c);
    op.coframe = jet_matrix_inverse(fm, n);
  }

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) op.row_pairs.emplace_back(i, j);
  for (int a = 1; a < n; ++a)
    for (int b = a; b < n; ++b) op.col_pairs.emplace_back(a, b);

  if (P == 0) return op;  // n = 1: both spaces are zero-dimensional

  auto phi = [&](int a, int i) -> const Jet& { return op.coframe[static_cast<std::size_t>(a * n + i)]; };
  // phiA[a][j] = sum_s phi^a_s A^s_j
  std::vector<Jet> phiA(static_cast<std::size_t>(n) * n, Jet(nv, ord));
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j) {
      Jet acc(nv, ord);
      for (int s = 0; s < n; ++s) acc += phi(a, s) * A[static_cast<std::size_t>(s * n + j)];
      phiA[static_cast<std::size_t>(a * n + j)] = acc;
    }
  auto phiA_at = [&](int a, int j) -> const Jet& { return phiA[static_cast<std::size_t>(a * n + j)]; };

  op.matrix.assign(static_cast<std::size_t>(P) * P, Jet(nv, ord));
  for (int rp = 0; rp < P; ++rp) {
    auto [i, j] = op.row_pairs[static_cast<std::size_t>(rp)];
    for (int cp = 0; cp < P; ++cp) {
      auto [a, b] = op.col_pairs[static_cast<std::size_t>(cp)];
      op.matrix[static_cast<std::size_t>(rp * P + cp)] =
          phi(a, i) * phiA_at(b, j) + phi(b, i) * phiA_at(a, j) - phi(a, j) * phiA_at(b, i) -
          phi(b, j) * phiA_at(a, i);
    }
  }

  Eigen::MatrixXd m0(P, P);
  for (int r = 0; r < P; ++r)
    for (int c = 0; c < P; ++c) m0(r, c) = op.matrix[static_cast<std::size_t>(r * P + c)].value();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m0);
  const double smin = svd.singularValues()(P - 1);
  const double smax = svd.singularValues()(0);
  if (smin < 1e-13 * std::max(1.0, smax))
    throw Error(Errc::not_cyclic, "antisymmetrization operator is singular: the field is not cyclic at the point");
  op.condition = smax / smin;
  return op;
}

ChristoffelJet build_natural_connection(const FModel& m, const std::string& X, std::span<const double> point,
                                        int order, std::optional<CounitChoice> counit,
                                        const std::vector<double>* aux_gamma) {
  const int n = m.dim();
  const int K = order;
  const int KH = K + 1;  // one extra order for the derivative of A and e

  ProductJet pj = product_at(m, point, KH);
  std::vector<Jet> ej = pj.e;
  std::vector<Jet> xj = field_jets(m, X, point, KH);

  // A^k_j = c^k_{js} X^s
  std::vector<Jet> A(static_cast<std::size_t>(n) * n, Jet(n, KH));
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      Jet acc(n, KH);
      for (int s = 0; s < n; ++s) acc += pj.cj(k, j, s) * xj[static_cast<std::size_t>(s)];
      A[static_cast<std::size_t>(k * n + j)] = acc;
    }

  // counit as a jet field with theta(e) = 1 identically to truncation order
  CounitChoice seed = counit ? *counit : default_counit(m, point);
  if (static_cast<int>(seed.theta.size()) != n) throw Error(Errc::shape, "counit covector has wrong length");
  {
    double pairing = 0.0;
    for (int i = 0; i < n; ++i)
      pairing += seed.theta[static_cast<std::size_t>(i)] * ej[static_cast<std::size_t>(i)].value();
    if (std::abs(pairing - 1.0) > 1e-12)
      throw Error(Errc::invalid, "counit covector does not pair to 1 with the unit at the base point");
  }
  std::vector<Jet> theta(static_cast<std::size_t>(n), Jet(n, K));
  {
    Jet pairing(n, KH);
    for (int i = 0; i < n; ++i) pairing += ej[static_cast<std::size_t>(i)] * seed.theta[static_cast<std::size_t>(i)];
    for (int i = 0; i < n; ++i)
      theta[static_cast<std::size_t>(i)] = (Jet::constant(n, KH, seed.theta[static_cast<std::size_t>(i)]) / pairing).truncated(K);
  }

  auto gbar = [&](int i, int j, int k) -> double {
    return aux_gamma ? (*aux_gamma)[static_cast<std::size_t>((i * n + j) * n + k)] : 0.0;
  };

  // nabla-bar of e: (D_j e)^i = d_j e^i + gbar^i_{jk} e^k, at order K
  std::vector<Jet> De(static_cast<std::size_t>(n) * n, Jet(n, K));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet acc = ej[static_cast<std::size_t>(i)].partial(j);
      for (int k = 0; k < n; ++k)
        if (gbar(i, j, k) != 0.0) acc += ej[static_cast<std::size_t>(k)].truncated(K) * gbar(i, j, k);
      De[static_cast<std::size_t>(i * n + j)] = acc;
    }
  // (D_e e)^i = e^j (D_j e)^i
  std::vector<Jet> Dee(static_cast<std::size_t>(n), Jet(n, K));
  for (int i = 0; i < n; ++i) {
    Jet acc(n, K);
    for (int j = 0; j < n; ++j) acc += ej[static_cast<std::size_t>(j)].truncated(K) * De[static_cast<std::size_t>(i * n + j)];
    Dee[static_cast<std::size_t>(i)] = acc;
  }

  // S0^i_{jk} = -theta_j (D_k e)^i - theta_k (D_j e)^i + theta_j theta_k (D_e e)^i
  std::vector<Jet> S0(static_cast<std::size_t>(n) * n * n, Jet(n, K));
  auto s0 = [&](int i, int j, int k) -> Jet& { return S0[static_cast<std::size_t>((i * n + j) * n + k)]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        s0(i, j, k) = -theta[static_cast<std::size_t>(j)] * De[static_cast<std::size_t>(i * n + k)] -
                      theta[static_cast<std::size_t>(k)] * De[static_cast<std::size_t>(i * n + j)] +
                      theta[static_cast<std::size_t>(j)] * theta[static_cast<std::size_t>(k)] * Dee[static_cast<std::size_t>(i)];

  // d_{nabla-bar} A at order K
  auto Atr = [&](int k, int j) { return A[static_cast<std::size_t>(k * n + j)].truncated(K); };
  std::vector<Jet> dA(static_cast<std::size_t>(n) * n * n, Jet(n, K));  // (k*n+i)*n+j, i<j used
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Jet acc = A[static_cast<std::size_t>(k * n + j)].partial(i) - A[static_cast<std::size_t>(k * n + i)].partial(j);
        for (int s = 0; s < n; ++s) {
          if (gbar(k, i, s) != 0.0) acc += Atr(s, j) * gbar(k, i, s);
          if (gbar(k, j, s) != 0.0) acc -= Atr(s, i) * gbar(k, j, s);
        }
        dA[static_cast<std::size_t>((k * n + i) * n + j)] = acc;
      }

  // RHS^k_{ij} = -dA^k_{ij} - (M_A S0)^k_{ij},
  // (M_A S0)^k_{ij} = S0^k_{is} A^s_j - S0^k_{js} A^s_i
  std::vector<Jet> Ak(static_cast<std::size_t>(n) * n, Jet(n, K));
  for (int i = 0; i < n * n; ++i) Ak[static_cast<std::size_t>(i)] = A[static_cast<std::size_t>(i)].truncated(K);

  std::vector<Jet> ejK(static_cast<std::size_t>(n), Jet(n, K));
  for (int i = 0; i < n; ++i) ejK[static_cast<std::size_t>(i)] = ej[static_cast<std::size_t>(i)].truncated(K);
  MAOperator op = assemble_MA(Ak, ejK);
  const int P = n * (n - 1) / 2;

  std::vector<Jet> S1(static_cast<std::size_t>(n) * n * n, Jet(n, K));
  auto s1 = [&](int i, int j, int k) -> Jet& { return S1[static_cast<std::size_t>((i * n + j) * n + k)]; };

  if (P > 0) {
    // right-hand sides: one column per value index k
    std::vector<Jet> rhs(static_cast<std::size_t>(P) * n, Jet(n, K));
    for (int rp = 0; rp < P; ++rp) {
      auto [i, j] = op.row_pairs[static_cast<std::size_t>(rp)];
      for (int k = 0; k < n; ++k) {
        Jet acc = -dA[static_cast<std::size_t>((k * n + i) * n + j)];
        for (int s = 0; s < n; ++s)
          acc -= s0(k, i, s) * Ak[static_cast<std::size_t>(s * n + j)] - s0(k, j, s) * Ak[static_cast<std::size_t>(s * n + i)];
        rhs[static_cast<std::size_t>(rp * n + k)] = acc;
      }
    }
    std::vector<Jet> coeff;
    try {
      coeff = jet_solve(op.matrix, std::move(rhs), P, n);
    } catch (const Error& err) {
      if (err.code() == Errc::singular)
        throw Error(Errc::not_cyclic, std::string("connection solve failed: ") + err.what());
      throw;
    }
    // S1^k_{ij} = sum_{a<=b} coeff^k_{ab} (phi^a_i phi^b_j + phi^b_i phi^a_j)
    auto phi = [&](int a, int i) -> const Jet& { return op.coframe[static_cast<std::size_t>(a * n + i)]; };
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          Jet acc(n, K);
          for (int cp = 0; cp < P; ++cp) {
            auto [a, b] = op.col_pairs[static_cast<std::size_t>(cp)];
            acc += coeff[static_cast<std::size_t>(cp * n + k)] * (phi(a, i) * phi(b, j) + phi(b, i) * phi(a, j));
          }
          s1(k, i, j) = acc;
          if (i != j) s1(k, j, i) = acc;
        }
  }

  ChristoffelJet gamma;
  gamma.point.assign(point.begin(), point.end());
  gamma.order = K;
  gamma.n = n;
  gamma.packed.assign(static_cast<std::size_t>(n) * (n * (n + 1) / 2), Jet(n, K));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        Jet acc = s0(i, j, k) + s1(i, j, k);
        if (aux_gamma) acc = acc + gbar(i, j, k);
        gamma.g(i, j, k) = acc;
      }
  return gamma;
}

namespace {

double maxj(const std::vector<Jet>& v) {
  double m = 0.0;
  for (const auto& j : v) m = std::max(m, j.max_abs());
  return m;
}

}  // namespace

Report check_connection_axioms(const ChristoffelJet& gamma, const FModel& m, const std::string& X,
                               std::span<const double> point, double tol) {
  const int n = m.dim();
  const int K = gamma.order;
  if (K < 1) throw Error(Errc::invalid, "check_connection_axioms needs a connection of order >= 1");
  const int Kr = K - 1;

  ProductJet pj = product_at(m, point, K);
  std::vector<Jet> xj = field_jets(m, X, point, K);

  auto G = [&](int i, int j, int k) { return gamma.g(i, j, k).truncated(Kr); };
  auto c = [&](int k, int i, int j) { return pj.cj(k, i, j).truncated(Kr); };
  auto e = [&](int i) { return pj.e[static_cast<std::size_t>(i)].truncated(Kr); };
  auto x = [&](int i) { return xj[static_cast<std::size_t>(i)].truncated(Kr); };

  // magnitudes for scale-free residuals
  const double mc = std::max(1.0, maxj(pj.c));
  const double me = std::max(1.0, maxj(pj.e));
  const double mX = std::max(1.0, maxj(xj));
  const double mG = std::max(1.0, gamma.max_abs());
  double mdc = 1.0, mde = 1.0, mdX = 1.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      mde = std::max(mde, pj.e[static_cast<std::size_t>(k)].partial(i).max_abs());
      mdX = std::max(mdX, xj[static_cast<std::size_t>(k)].partial(i).max_abs());
      for (int j = 0; j < n; ++j) mdc = std::max(mdc, pj.cj(k, i, j).partial(0).max_abs());
    }

  Report rep;
  rep.check = "connection_axioms";
  rep.point.assign(point.begin(), point.end());
  rep.order = K;
  rep.tol = tol;
  rep.convention_notes = "residuals normalized by magnitude bounds of the contracted terms";

  // (1) flat unit: d_j e^i + G^i_{jk} e^k
  double r1 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet acc = pj.e[static_cast<std::size_t>(i)].partial(j);
      for (int k = 0; k < n; ++k) acc += G(i, j, k) * e(k);
      r1 = std::max(r1, acc.max_abs());
    }
  rep.add("flat_unit", r1 / std::max(1.0, mde + mG * me));

  // A^k_j and d_nabla A
  std::vector<Jet> A(static_cast<std::size_t>(n) * n, Jet(n, K));
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      Jet acc(n, K);
      for (int s = 0; s < n; ++s) acc += pj.cj(k, j, s) * xj[static_cast<std::size_t>(s)];
      A[static_cast<std::size_t>(k * n + j)] = acc;
    }
  const double mA = std::max(1.0, maxj(A));
  double r2 = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Jet acc = A[static_cast<std::size_t>(k * n + j)].partial(i) - A[static_cast<std::size_t>(k * n + i)].partial(j);
        for (int s = 0; s < n; ++s)
          acc += G(k, i, s) * A[static_cast<std::size_t>(s * n + j)].truncated(Kr) -
                 G(k, j, s) * A[static_cast<std::size_t>(s * n + i)].truncated(Kr);
        r2 = std::max(r2, acc.max_abs());
      }
  rep.add("d_nabla_X_product", r2 / std::max(1.0, mdc * mX + mdX * mc + mG * mA));

  // T^k_{u,ij} = (nabla_u c)^k_{ij}
  std::vector<Jet> Tt(static_cast<std::size_t>(n) * n * n * n, Jet(n, Kr));
  auto Tat = [&](int k, int u, int i, int j) -> Jet& {
    return Tt[static_cast<std::size_t>(((k * n + u) * n + i) * n + j)];
  };
  for (int k = 0; k < n; ++k)
    for (int u = 0; u < n; ++u)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Jet acc = pj.cj(k, i, j).partial(u);
          for (int s = 0; s < n; ++s)
            acc += G(k, u, s) * c(s, i, j) - G(s, u, i) * c(k, s, j) - G(s, u, j) * c(k, i, s);
          Tat(k, u, i, j) = acc;
        }
  const double mT = std::max(1.0, maxj(Tt));

  // (3) full symmetry: T^k_{i,jl} - T^k_{j,il}
  double r3 = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int l = 0; l < n; ++l) r3 = std::max(r3, (Tat(k, i, j, l) - Tat(k, j, i, l)).max_abs());
  rep.add("full_symmetry", r3 / mT);

  // (4) radiality: nabla_j X - (X o)'... residual (nabla_j X)^i - c^i_{jk} W0^k, W0 = nabla_e X
  std::vector<Jet> nablaX(static_cast<std::size_t>(n) * n, Jet(n, Kr));  // i*n+j = (nabla_j X)^i
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet acc = xj[static_cast<std::size_t>(i)].partial(j);
      for (int k = 0; k < n; ++k) acc += G(i, j, k) * x(k);
      nablaX[static_cast<std::size_t>(i * n + j)] = acc;
    }
  std::vector<Jet> W0(static_cast<std::size_t>(n), Jet(n, Kr));
  for (int i = 0; i < n; ++i) {
    Jet acc(n, Kr);
    for (int j = 0; j < n; ++j) acc += e(j) * nablaX[static_cast<std::size_t>(i * n + j)];
    W0[static_cast<std::size_t>(i)] = acc;
  }
  double r4 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet acc = nablaX[static_cast<std::size_t>(i * n + j)];
      for (int k = 0; k < n; ++k) acc -= c(i, j, k) * W0[static_cast<std::size_t>(k)];
      r4 = std::max(r4, acc.max_abs());
    }
  rep.add("radial_X", r4 / std::max(1.0, (1.0 + mc * me) * (mdX + mG * mX)));

  // (5) T(e,.,.) and T(.,e,.)
  double r5 = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet acc1(n, Kr), acc2(n, Kr);
        for (int u = 0; u < n; ++u) {
          acc1 += e(u) * Tat(k, u, i, j);
          acc2 += e(u) * Tat(k, i, u, j);
        }
        r5 = std::max(r5, std::max(acc1.max_abs(), acc2.max_abs()));
      }
  rep.add("unit_T", r5 / std::max(1.0, mT * me));

  // (6) covariant associativity on basis 4-tuples:
  // T(u, v o w, z) + T(u,v,w) o z = T(u, v, w o z) + v o T(u,w,z)
  double r6 = 0.0;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      for (int w = 0; w < n; ++w)
        for (int z = 0; z < n; ++z)
          for (int k = 0; k < n; ++k) {
            Jet acc(n, Kr);
            for (int s = 0; s < n; ++s) {
              acc += c(s, v, w) * Tat(k, u, s, z) + c(k, s, z) * Tat(s, u, v, w);
              acc -= c(s, w, z) * Tat(k, u, v, s) + c(k, v, s) * Tat(s, u, w, z);
            }
            r6 = std::max(r6, acc.max_abs());
          }
  rep.add("covariant_associativity", r6 / std::max(1.0, mT * mc));

  // (7) covariant Hertling-Manin on basis 4-tuples (p,q,r,s):
  // 0 = T(r o s, p, q) - T(p o q, r, s) + T(p,r,s) o q + T(q,r,s) o p
  //     - T(s,p,q) o r - T(r,p,q) o s
  double r7 = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          for (int k = 0; k < n; ++k) {
            Jet acc(n, Kr);
            for (int mm = 0; mm < n; ++mm) {
              acc += c(mm, r, s) * Tat(k, mm, p, q) - c(mm, p, q) * Tat(k, mm, r, s);
              acc += c(k, mm, q) * Tat(mm, p, r, s) + c(k, mm, p) * Tat(mm, q, r, s);
              acc -= c(k, mm, r) * Tat(mm, s, p, q) + c(k, mm, s) * Tat(mm, r, p, q);
            }
            r7 = std::max(r7, acc.max_abs());
          }
  rep.add("covariant_hertling_manin", r7 / std::max(1.0, mT * mc));

  // point values of the Christoffels for the report
  for (int i = 0; i < n && n <= 4; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k)
        rep.values["Gamma^" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + std::to_string(k + 1)] =
            gamma.g(i, j, k).value();

  return rep.finish();
}

}  // namespace fman
