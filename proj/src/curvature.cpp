#include "fman/curvature.hpp"

#include <algorithm>
#include <cmath>

namespace fman {

double RiemannAtPoint::max_abs() const {
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

RiemannAtPoint riemann_tensor(const ChristoffelJet& gamma) {
  if (gamma.order < 1) throw Error(Errc::invalid, "riemann_tensor needs Christoffel jets of order >= 1");
  const int n = gamma.n;
  RiemannAtPoint R;
  R.point = gamma.point;
  R.n = n;
  R.r.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int s = 0; s < n; ++s)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = gamma.g(k, j, s).partial(i).value() - gamma.g(k, i, s).partial(j).value();
          for (int r2 = 0; r2 < n; ++r2)
            v += gamma.g(k, i, r2).value() * gamma.g(r2, j, s).value() -
                 gamma.g(k, j, r2).value() * gamma.g(r2, i, s).value();
          R.at(k, s, i, j) = v;
        }
  return R;
}

Report check_3rc(const RiemannAtPoint& R, const ProductJet& prod, double tol) {
  const int n = R.n;
  if (prod.n != n) throw Error(Errc::shape, "product and curvature dimension mismatch");
  auto c = [&](int k, int i, int j) { return prod.cj(k, i, j).value(); };

  const double scale = std::max(1.0, R.max_abs()) * [&] {
    double mc = 1.0;
    for (const auto& j : prod.c) mc = std::max(mc, std::abs(j.value()));
    return mc;
  }();

  Report rep;
  rep.check = "curvature_3rc";
  rep.point = R.point;
  rep.order = 0;
  rep.tol = tol;
  rep.convention_notes =
      "R^k_{sij} antisymmetric in the last two slots; residuals normalized by max|R|*max|c|";

  // coordinate form 1: R^s_{lmi} c^j_{ks} + R^s_{lik} c^j_{ms} + R^s_{lkm} c^j_{is}
  double f1 = 0.0;
  for (int l = 0; l < n; ++l)
    for (int mm = 0; mm < n; ++mm)
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
          for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int s = 0; s < n; ++s)
              acc += R.at(s, l, mm, i) * c(j, k, s) + R.at(s, l, i, k) * c(j, mm, s) + R.at(s, l, k, mm) * c(j, i, s);
            f1 = std::max(f1, std::abs(acc));
          }
  rep.add("coordinate_form_1", f1 / scale);

  // coordinate form 2: R^j_{skl} c^s_{mi} + R^j_{smk} c^s_{li} + R^j_{slm} c^s_{ki}
  double f2 = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int mm = 0; mm < n; ++mm)
          for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int s = 0; s < n; ++s)
              acc += R.at(j, s, k, l) * c(s, mm, i) + R.at(j, s, mm, k) * c(s, l, i) + R.at(j, s, l, mm) * c(s, k, i);
            f2 = std::max(f2, std::abs(acc));
          }
  rep.add("coordinate_form_2", f2 / scale);

  // invariant form, product inside: R(U,V)(W o Z) + R(V,W)(U o Z) + R(W,U)(V o Z)
  double fin = 0.0;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      for (int w = 0; w < n; ++w)
        for (int z = 0; z < n; ++z)
          for (int k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int s = 0; s < n; ++s)
              acc += c(s, w, z) * R.at(k, s, u, v) + c(s, u, z) * R.at(k, s, v, w) + c(s, v, z) * R.at(k, s, w, u);
            fin = std::max(fin, std::abs(acc));
          }
  rep.add("invariant_product_inside", fin / scale);

  // invariant form, product outside: W o R(U,V)Z + U o R(V,W)Z + V o R(W,U)Z
  double fout = 0.0;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      for (int w = 0; w < n; ++w)
        for (int z = 0; z < n; ++z)
          for (int k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int s = 0; s < n; ++s)
              acc += c(k, w, s) * R.at(s, z, u, v) + c(k, u, s) * R.at(s, z, v, w) + c(k, v, s) * R.at(s, z, w, u);
            fout = std::max(fout, std::abs(acc));
          }
  rep.add("invariant_product_outside", fout / scale);

  rep.values["max_R"] = R.max_abs();
  return rep.finish();
}

ObstructionTensors obstruction_tensors(const FModel& m, const std::string& X, std::span<const double> point,
                                       int order) {
  const int n = m.dim();
  if (order < 2) throw Error(Errc::invalid, "obstruction_tensors needs order >= 2");
  // adapted chart precondition: e constant and equal to the first basis vector
  for (int i = 0; i < n; ++i) {
    if (!m.e[static_cast<std::size_t>(i)].is_constant())
      throw Error(Errc::invalid, "obstruction tensors need a constant unit field (adapt the chart first)");
    double v = m.e[static_cast<std::size_t>(i)].eval(m.coords, point);
    if (std::abs(v - (i == 0 ? 1.0 : 0.0)) > 1e-14)
      throw Error(Errc::invalid, "chart not adapted: unit must be the first basis vector");
  }

  ProductJet pj = product_at(m, point, order);
  ChristoffelJet gamma = build_natural_connection(m, X, point, order - 1);

  ObstructionTensors obs;
  obs.point.assign(point.begin(), point.end());
  obs.n = n;
  const std::size_t sz = static_cast<std::size_t>(n) * n * n * n;
  obs.C.assign(sz, 0.0);
  obs.A.assign(sz, 0.0);
  obs.B.assign(sz, 0.0);
  auto idx = [&](int k, int i, int j, int s) { return static_cast<std::size_t>(((k * n + i) * n + j) * n + s); };

  auto c = [&](int k, int i, int j) { return pj.cj(k, i, j).value(); };
  auto dc = [&](int k, int i, int j, int l) { return pj.cj(k, i, j).partial(l).value(); };
  auto G = [&](int i, int j, int k) { return gamma.g(i, j, k).value(); };
  auto dG = [&](int i, int j, int k, int l) { return gamma.g(i, j, k).partial(l).value(); };

  for (int k = 0; k < n; ++k)
    for (int i = 1; i < n; ++i)
      for (int j = 1; j < n; ++j)
        for (int s = 0; s < n; ++s) {
          double Cv = 0.0, Av = dc(k, j, s, i) - dc(k, i, s, j), Bv = -(dG(k, j, s, i) - dG(k, i, s, j));
          for (int r = 0; r < n; ++r) {
            Cv += c(k, j, r) * c(r, i, s) - c(k, i, r) * c(r, j, s);
            Av -= c(k, j, r) * G(r, i, s) - c(k, i, r) * G(r, j, s);
            Av -= G(k, j, r) * c(r, i, s) - G(k, i, r) * c(r, j, s);
            Bv -= c(k, j, r) * dG(r, i, s, 0) - c(k, i, r) * dG(r, j, s, 0);
            Bv += G(k, j, r) * G(r, i, s) - G(k, i, r) * G(r, j, s);
          }
          obs.C[idx(k, i, j, s)] = Cv;
          obs.A[idx(k, i, j, s)] = Av;
          obs.B[idx(k, i, j, s)] = Bv;
        }
  return obs;
}

}  // namespace fman
