#include "fman/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

namespace fman {

const Expr* FModel::c_entry(int k, int i, int j) const {
  auto it = c.find({k, i, j});
  return it == c.end() ? nullptr : &it->second;
}

void FModel::set_c(int k, int i, int j, Expr expr) { c[{k, i, j}] = std::move(expr); }

const std::vector<Expr>& FModel::field(const std::string& fname) const {
  auto it = fields.find(fname);
  if (it == fields.end()) throw Error(Errc::unknown_name, "unknown field '" + fname + "' in model '" + name + "'");
  return it->second;
}

void FModel::validate() const {
  const int n = dim();
  if (n < 1) throw Error(Errc::invalid, "model '" + name + "' declares no coordinates");
  std::set<std::string> declared(coords.begin(), coords.end());
  if (static_cast<int>(declared.size()) != n)
    throw Error(Errc::invalid, "model '" + name + "' has duplicate coordinate names");
  auto check_expr = [&](const Expr& ex, const std::string& what) {
    for (const auto& cn : ex.coordinates())
      if (!declared.count(cn))
        throw Error(Errc::unknown_name, "model '" + name + "': " + what + " references undeclared coordinate '" + cn + "'");
  };
  for (const auto& [key, ex] : c) {
    for (int idx : key)
      if (idx < 0 || idx >= n) throw Error(Errc::invalid, "model '" + name + "': product index out of range");
    check_expr(ex, "structure function");
  }
  if (static_cast<int>(e.size()) != n) throw Error(Errc::invalid, "model '" + name + "': unit field has wrong length");
  for (const auto& ex : e) check_expr(ex, "unit component");
  for (const auto& [fname, comps] : fields) {
    if (static_cast<int>(comps.size()) != n)
      throw Error(Errc::invalid, "model '" + name + "': field '" + fname + "' has wrong length");
    for (const auto& ex : comps) check_expr(ex, "field '" + fname + "'");
  }
  if (!metric.empty()) {
    if (static_cast<int>(metric.size()) != n) throw Error(Errc::invalid, "model '" + name + "': metric has wrong shape");
    for (const auto& row : metric) {
      if (static_cast<int>(row.size()) != n) throw Error(Errc::invalid, "model '" + name + "': metric has wrong shape");
      for (const auto& ex : row)
        if (!ex.empty()) check_expr(ex, "metric entry");
    }
  }
  for (const auto& [dname, ex] : densities) check_expr(ex, "density '" + dname + "'");
  if (!base_point.empty() && static_cast<int>(base_point.size()) != n)
    throw Error(Errc::invalid, "model '" + name + "': base point has wrong length");
}

ProductJet product_at(const FModel& m, std::span<const double> point, int order) {
  const int n = m.dim();
  if (static_cast<int>(point.size()) != n) throw Error(Errc::shape, "point length does not match model dimension");
  ProductJet p;
  p.point.assign(point.begin(), point.end());
  p.order = order;
  p.n = n;
  const Jet zero(n, order);
  p.c.assign(static_cast<std::size_t>(n) * n * n, zero);
  p.e.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (const Expr* ex = m.c_entry(k, i, j)) p.cj(k, i, j) = ex->eval_jet(m.coords, point, order);
  for (int i = 0; i < n; ++i) p.e.push_back(m.e[static_cast<std::size_t>(i)].eval_jet(m.coords, point, order));
  return p;
}

std::vector<Jet> field_jets(const FModel& m, std::span<const Expr> comps, std::span<const double> point, int order) {
  std::vector<Jet> out;
  out.reserve(comps.size());
  for (const auto& ex : comps) out.push_back(ex.eval_jet(m.coords, point, order));
  return out;
}

std::vector<Jet> field_jets(const FModel& m, const std::string& fname, std::span<const double> point, int order) {
  return field_jets(m, m.field(fname), point, order);
}

namespace {

double max_abs(const std::vector<Jet>& js) {
  double v = 0.0;
  for (const auto& j : js) v = std::max(v, j.max_abs());
  return v;
}

}  // namespace

Report check_algebra_axioms(const FModel& m, std::span<const double> point, int order, double tol) {
  if (order < 1) throw Error(Errc::invalid, "check_algebra_axioms needs order >= 1");
  const int n = m.dim();
  ProductJet p = product_at(m, point, order);

  Report rep;
  rep.check = "algebra_axioms";
  rep.point.assign(point.begin(), point.end());
  rep.order = order;
  rep.tol = tol;
  rep.convention_notes = "residuals normalized by powers of max|c|, max|e|, max|dc|";

  const double mc = std::max(1.0, max_abs(p.c));
  const double me = std::max(1.0, max_abs(p.e));

  double r_comm = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) r_comm = std::max(r_comm, (p.cj(k, i, j) - p.cj(k, j, i)).max_abs());
  rep.add("commutativity", r_comm / mc);

  // c^i_{sj} c^s_{km} = c^i_{sk} c^s_{jm}
  double r_assoc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int mm = 0; mm < n; ++mm) {
          Jet acc(n, order);
          for (int s = 0; s < n; ++s)
            acc += p.cj(i, s, j) * p.cj(s, k, mm) - p.cj(i, s, k) * p.cj(s, j, mm);
          r_assoc = std::max(r_assoc, acc.max_abs());
        }
  rep.add("associativity", r_assoc / (mc * mc));

  double r_unit = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      Jet acc(n, order);
      for (int j = 0; j < n; ++j) acc += p.cj(k, i, j) * p.e[static_cast<std::size_t>(j)];
      if (k == i) acc = acc - 1.0;
      r_unit = std::max(r_unit, acc.max_abs());
    }
  rep.add("unit", r_unit / (mc * me));

  // Hertling-Manin defect on coordinate 4-tuples (a,b,c,d), value index q:
  //   c^m_{ab} d_m c^q_{cd} - c^m_{cd} d_m c^q_{ab}
  //   + d_d c^m_{ab} c^q_{mc} + d_c c^m_{ab} c^q_{md}
  //   - d_b c^m_{cd} c^q_{am} - d_a c^m_{cd} c^q_{bm}
  const int ord1 = order - 1;
  std::vector<Jet> dc(static_cast<std::size_t>(n) * n * n * n, Jet(n, ord1));  // ((k*n+i)*n+j)*n+l -> d_l c^k_{ij}
  auto dcj = [&](int k, int i, int j, int l) -> Jet& {
    return dc[static_cast<std::size_t>(((k * n + i) * n + j) * n + l)];
  };
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) dcj(k, i, j, l) = p.cj(k, i, j).partial(l);
  double mdc = 1.0;
  for (const auto& j : dc) mdc = std::max(mdc, j.max_abs());

  double r_hm = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc)
        for (int d = 0; d < n; ++d)
          for (int q = 0; q < n; ++q) {
            Jet acc(n, ord1);
            for (int mi = 0; mi < n; ++mi) {
              const Jet cab = p.cj(mi, a, b).truncated(ord1);
              const Jet ccd = p.cj(mi, cc, d).truncated(ord1);
              acc += cab * dcj(q, cc, d, mi) - ccd * dcj(q, a, b, mi);
              acc += dcj(mi, a, b, d) * p.cj(q, mi, cc).truncated(ord1);
              acc += dcj(mi, a, b, cc) * p.cj(q, mi, d).truncated(ord1);
              acc -= dcj(mi, cc, d, b) * p.cj(q, a, mi).truncated(ord1);
              acc -= dcj(mi, cc, d, a) * p.cj(q, b, mi).truncated(ord1);
            }
            r_hm = std::max(r_hm, acc.max_abs());
          }
  rep.add("hertling_manin", r_hm / (mc * mdc));

  return rep.finish();
}

CyclicityInfo cyclicity_info(const FModel& m, const std::string& X, std::span<const double> point, double tol) {
  const int n = m.dim();
  ProductJet p = product_at(m, point, 0);
  std::vector<Jet> xj = field_jets(m, X, point, 0);

  Eigen::MatrixXd frame(n, n);
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = p.e[static_cast<std::size_t>(i)].value();
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) frame(i, k) = col[static_cast<std::size_t>(i)];
    if (k + 1 < n) {
      std::vector<double> next(static_cast<std::size_t>(n), 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l)
            next[static_cast<std::size_t>(i)] +=
                p.cj(i, j, l).value() * xj[static_cast<std::size_t>(j)].value() * col[static_cast<std::size_t>(l)];
      col = next;
    }
  }

  CyclicityInfo info;
  info.det = frame.determinant();
  Eigen::MatrixXd scaled = frame;
  double norm_prod = 1.0;
  for (int k = 0; k < n; ++k) {
    double nk = frame.col(k).norm();
    norm_prod *= nk;
    if (nk > 0) scaled.col(k) /= nk;
  }
  info.det_scaled = norm_prod > 0 ? scaled.determinant() : 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(frame);
  info.sigma_min = svd.singularValues()(n - 1);
  info.cyclic = std::abs(info.det_scaled) > tol;
  info.frame.resize(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) info.frame[static_cast<std::size_t>(k * n + i)] = frame(i, k);
  return info;
}

Report check_cyclic(const FModel& m, const std::string& X, std::span<const double> point, double tol) {
  CyclicityInfo info = cyclicity_info(m, X, point, tol);
  Report rep;
  rep.check = "cyclicity";
  rep.point.assign(point.begin(), point.end());
  rep.order = 0;
  rep.tol = tol;
  rep.add("frame_det_scaled", std::abs(info.det_scaled));
  rep.add("sigma_min", info.sigma_min);
  rep.values["frame_det"] = info.det;
  rep.verdict = info.cyclic;
  rep.convention_notes =
      "verdict: cyclic iff |det| of the column-normalized frame e, X, X^2, ... exceeds tol; "
      "items are magnitudes, not residuals";
  return rep;
}

FModel make_dh_model(const std::vector<int>& block_sizes, std::vector<Expr> X_components) {
  int n = 0;
  for (int msize : block_sizes) {
    if (msize < 1) throw Error(Errc::invalid, "block sizes must be positive");
    n += msize;
  }
  if (static_cast<int>(X_components.size()) != n)
    throw Error(Errc::invalid, "X component count does not match total block size");

  FModel m;
  m.name = "dh";
  for (std::size_t a = 0; a < block_sizes.size(); ++a)
    for (int i = 1; i <= block_sizes[a]; ++i) m.coords.push_back("u" + std::to_string(a + 1) + "_" + std::to_string(i));

  // c^{(i,a)}_{(j,a)(k,a)} = 1 when i = j+k-1 within the block, else 0
  int base = 0;
  for (int msize : block_sizes) {
    for (int j = 1; j <= msize; ++j)
      for (int k = 1; k <= msize; ++k) {
        int i = j + k - 1;
        if (i <= msize) m.set_c(base + i - 1, base + j - 1, base + k - 1, Expr::constant(1.0));
      }
    base += msize;
  }
  m.e.assign(static_cast<std::size_t>(n), Expr::constant(0.0));
  base = 0;
  for (int msize : block_sizes) {
    m.e[static_cast<std::size_t>(base)] = Expr::constant(1.0);
    base += msize;
  }
  m.fields["X"] = std::move(X_components);
  m.base_point.assign(static_cast<std::size_t>(n), 0.0);
  m.validate();
  return m;
}

bool dh_regular_nondegenerate(const std::vector<int>& block_sizes, std::span<const double> X_values) {
  std::vector<double> leads;
  int base = 0;
  for (int msize : block_sizes) {
    leads.push_back(X_values[static_cast<std::size_t>(base)]);
    if (msize >= 2 && X_values[static_cast<std::size_t>(base + 1)] == 0.0) return false;
    base += msize;
  }
  for (std::size_t a = 0; a < leads.size(); ++a)
    for (std::size_t b = a + 1; b < leads.size(); ++b)
      if (leads[a] == leads[b]) return false;
  return true;
}

}  // namespace fman
