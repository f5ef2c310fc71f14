#include "fman/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <unordered_map>

namespace fman {

namespace {

constexpr int kMaxVars = 8;
constexpr int kMaxOrder = 255;

std::uint64_t pack_exponents(const std::uint8_t* alpha, int nvars) {
  std::uint64_t key = 0;
  for (int i = 0; i < nvars; ++i) key = (key << 8) | alpha[i];
  return key;
}

struct TableImpl : MonomialTable {
  std::unordered_map<std::uint64_t, int> index;
};

void enumerate_degree(int nvars, int var, int remaining, std::vector<std::uint8_t>& current,
                      std::vector<std::uint8_t>& out) {
  if (var == nvars - 1) {
    current[var] = static_cast<std::uint8_t>(remaining);
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[var] = static_cast<std::uint8_t>(e);
    enumerate_degree(nvars, var + 1, remaining - e, current, out);
  }
}

const TableImpl* build_table(int nvars, int order) {
  auto* t = new TableImpl();
  t->nvars = nvars;
  t->order = order;
  t->degree_offset.assign(static_cast<std::size_t>(order) + 2, 0);
  std::vector<std::uint8_t> current(static_cast<std::size_t>(nvars), 0);
  for (int d = 0; d <= order; ++d) {
    t->degree_offset[d] = static_cast<int>(t->exps.size()) / nvars;
    enumerate_degree(nvars, 0, d, current, t->exps);
    int upto = static_cast<int>(t->exps.size()) / nvars;
    for (int idx = t->degree_offset[d]; idx < upto; ++idx) t->degree.push_back(static_cast<std::uint8_t>(d));
  }
  t->count = static_cast<int>(t->exps.size()) / nvars;
  t->degree_offset[order + 1] = t->count;
  t->index.reserve(static_cast<std::size_t>(t->count) * 2);
  for (int i = 0; i < t->count; ++i) t->index.emplace(pack_exponents(t->mono(i), nvars), i);
  return t;
}

}  // namespace

int MonomialTable::index_of(const std::uint8_t* alpha) const {
  const auto& impl = static_cast<const TableImpl&>(*this);
  auto it = impl.index.find(pack_exponents(alpha, nvars));
  return it == impl.index.end() ? -1 : it->second;
}

const MonomialTable& MonomialTable::get(int nvars, int order) {
  if (nvars < 1 || nvars > kMaxVars) throw Error(Errc::shape, "jet variable count out of range [1,8]");
  if (order < 0 || order > kMaxOrder) throw Error(Errc::shape, "jet order out of range [0,255]");
  static std::mutex mu;
  static std::map<std::pair<int, int>, const TableImpl*> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(nvars, order);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_table(nvars, order)).first;
  return *it->second;
}

Jet::Jet(int nvars, int order) : nvars_(nvars), order_(order) {
  c_.assign(static_cast<std::size_t>(MonomialTable::get(nvars, order).count), 0.0);
}

Jet Jet::constant(int nvars, int order, double v) {
  Jet j(nvars, order);
  j.c_[0] = v;
  return j;
}

Jet Jet::variable(int nvars, int order, int i, double base) {
  if (i < 0 || i >= nvars) throw Error(Errc::shape, "jet variable index out of range");
  Jet j(nvars, order);
  j.c_[0] = base;
  if (order >= 1) {
    // degree-1 monomials start right after the constant
    std::vector<std::uint8_t> alpha(static_cast<std::size_t>(nvars), 0);
    alpha[static_cast<std::size_t>(i)] = 1;
    j.c_[static_cast<std::size_t>(j.table().index_of(alpha.data()))] = 1.0;
  }
  return j;
}

double Jet::coeff(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != nvars_) throw Error(Errc::shape, "multi-index length mismatch");
  int deg = 0;
  std::vector<std::uint8_t> a(static_cast<std::size_t>(nvars_), 0);
  for (int i = 0; i < nvars_; ++i) {
    if (alpha[i] < 0) throw Error(Errc::shape, "negative multi-index entry");
    deg += alpha[i];
    a[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(alpha[i]);
  }
  if (deg > order_) return 0.0;
  return c_[static_cast<std::size_t>(table().index_of(a.data()))];
}

void Jet::check_same_shape(const Jet& o) const {
  if (nvars_ != o.nvars_ || order_ != o.order_)
    throw Error(Errc::shape, "jet shape mismatch: (" + std::to_string(nvars_) + "," + std::to_string(order_) +
                                 ") vs (" + std::to_string(o.nvars_) + "," + std::to_string(o.order_) + ")");
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (auto& v : r.c_) v = -v;
  return r;
}

Jet Jet::operator+(const Jet& o) const {
  check_same_shape(o);
  Jet r = *this;
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
  return r;
}

Jet Jet::operator-(const Jet& o) const {
  check_same_shape(o);
  Jet r = *this;
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  check_same_shape(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  check_same_shape(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet Jet::operator*(const Jet& o) const {
  check_same_shape(o);
  const auto& t = table();
  Jet r(nvars_, order_);
  std::vector<std::uint8_t> sum(static_cast<std::size_t>(nvars_), 0);
  for (int i = 0; i < t.count; ++i) {
    const double ai = c_[static_cast<std::size_t>(i)];
    if (ai == 0.0) continue;
    const int di = t.degree[static_cast<std::size_t>(i)];
    const std::uint8_t* ei = t.mono(i);
    const int jmax = t.count_up_to_degree(order_ - di);
    for (int j = 0; j < jmax; ++j) {
      const double bj = o.c_[static_cast<std::size_t>(j)];
      if (bj == 0.0) continue;
      const std::uint8_t* ej = t.mono(j);
      for (int v = 0; v < nvars_; ++v) sum[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(ei[v] + ej[v]);
      r.c_[static_cast<std::size_t>(t.index_of(sum.data()))] += ai * bj;
    }
  }
  return r;
}

Jet Jet::operator/(const Jet& o) const {
  check_same_shape(o);
  const double b0 = o.value();
  if (b0 == 0.0) throw Error(Errc::domain, "jet division by zero constant term");
  const auto& t = table();
  Jet r(nvars_, order_);
  std::vector<std::uint8_t> diff(static_cast<std::size_t>(nvars_), 0);
  // graded recursion: (b*r)|_alpha = a|_alpha
  for (int idx = 0; idx < t.count; ++idx) {
    double acc = c_[static_cast<std::size_t>(idx)];
    const std::uint8_t* ea = t.mono(idx);
    const int da = t.degree[static_cast<std::size_t>(idx)];
    const int jmax = t.count_up_to_degree(da);
    for (int j = 1; j < jmax; ++j) {
      const double bj = o.c_[static_cast<std::size_t>(j)];
      if (bj == 0.0) continue;
      const std::uint8_t* eb = t.mono(j);
      bool fits = true;
      for (int v = 0; v < nvars_; ++v) {
        if (eb[v] > ea[v]) {
          fits = false;
          break;
        }
        diff[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(ea[v] - eb[v]);
      }
      if (!fits) continue;
      acc -= bj * r.c_[static_cast<std::size_t>(t.index_of(diff.data()))];
    }
    r.c_[static_cast<std::size_t>(idx)] = acc / b0;
  }
  return r;
}

Jet Jet::operator+(double s) const {
  Jet r = *this;
  r.c_[0] += s;
  return r;
}

Jet Jet::operator-(double s) const {
  Jet r = *this;
  r.c_[0] -= s;
  return r;
}

Jet Jet::operator*(double s) const {
  Jet r = *this;
  for (auto& v : r.c_) v *= s;
  return r;
}

Jet Jet::operator/(double s) const {
  if (s == 0.0) throw Error(Errc::domain, "jet division by zero scalar");
  Jet r = *this;
  for (auto& v : r.c_) v /= s;
  return r;
}

Jet operator/(double s, const Jet& j) { return Jet::constant(j.nvars(), j.order(), s) / j; }

Jet Jet::pow_int(int p) const {
  if (p == 0) return Jet::constant(nvars_, order_, 1.0);
  if (p < 0) return Jet::constant(nvars_, order_, 1.0) / pow_int(-p);
  Jet base = *this;
  Jet r = Jet::constant(nvars_, order_, 1.0);
  int e = p;
  while (e > 0) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return r;
}

Jet Jet::truncated(int new_order) const {
  if (new_order > order_) throw Error(Errc::shape, "cannot truncate a jet to a higher order");
  if (new_order == order_) return *this;
  Jet r(nvars_, new_order);
  const int n = r.size();
  for (int i = 0; i < n; ++i) r.c_[static_cast<std::size_t>(i)] = c_[static_cast<std::size_t>(i)];
  return r;
}

Jet Jet::partial(int var) const {
  if (order_ < 1) throw Error(Errc::invalid, "jet partial derivative needs order >= 1");
  if (var < 0 || var >= nvars_) throw Error(Errc::shape, "jet variable index out of range");
  const auto& t = table();
  Jet r(nvars_, order_ - 1);
  const auto& rt = r.table();
  std::vector<std::uint8_t> up(static_cast<std::size_t>(nvars_), 0);
  for (int i = 0; i < rt.count; ++i) {
    const std::uint8_t* e = rt.mono(i);
    for (int v = 0; v < nvars_; ++v) up[static_cast<std::size_t>(v)] = e[v];
    up[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(e[var] + 1);
    r.c_[static_cast<std::size_t>(i)] = (e[var] + 1.0) * c_[static_cast<std::size_t>(t.index_of(up.data()))];
  }
  return r;
}

Jet Jet::shifted(std::span<const double> offset, int new_order) const {
  if (static_cast<int>(offset.size()) != nvars_) throw Error(Errc::shape, "offset length mismatch");
  if (new_order > order_) throw Error(Errc::shape, "cannot shift a jet to a higher order");
  const auto& t = table();
  Jet r(nvars_, new_order);
  const auto& rt = r.table();
  // Q[beta] = sum_{alpha >= beta} P[alpha] * prod C(alpha_v, beta_v) * offset^(alpha-beta)
  for (int b = 0; b < rt.count; ++b) {
    const std::uint8_t* eb = rt.mono(b);
    double acc = 0.0;
    for (int a = 0; a < t.count; ++a) {
      const double pa = c_[static_cast<std::size_t>(a)];
      if (pa == 0.0) continue;
      const std::uint8_t* ea = t.mono(a);
      double w = 1.0;
      bool ok = true;
      for (int v = 0; v < nvars_ && ok; ++v) {
        if (ea[v] < eb[v]) {
          ok = false;
          break;
        }
        // binomial(ea, eb) * offset^(ea-eb)
        double binom = 1.0;
        for (int k = 0; k < eb[v]; ++k) binom = binom * (ea[v] - k) / (k + 1.0);
        w *= binom;
        for (int k = 0; k < ea[v] - eb[v]; ++k) w *= offset[static_cast<std::size_t>(v)];
      }
      if (ok) acc += pa * w;
    }
    r.c_[static_cast<std::size_t>(b)] = acc;
  }
  return r;
}

Jet Jet::compose_linear(const std::vector<std::vector<double>>& L) const {
  if (static_cast<int>(L.size()) != nvars_) throw Error(Errc::shape, "linear map row count mismatch");
  for (const auto& row : L)
    if (static_cast<int>(row.size()) != nvars_) throw Error(Errc::shape, "linear map column count mismatch");
  // substituted variables as degree-1 jets, with cached powers
  std::vector<std::vector<Jet>> powers(static_cast<std::size_t>(nvars_));
  for (int a = 0; a < nvars_; ++a) {
    Jet lin(nvars_, order_);
    for (int i = 0; i < nvars_; ++i) {
      if (L[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] != 0.0)
        lin += Jet::variable(nvars_, order_, i, 0.0) * L[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)];
    }
    auto& p = powers[static_cast<std::size_t>(a)];
    p.push_back(Jet::constant(nvars_, order_, 1.0));
    for (int k = 1; k <= order_; ++k) p.push_back(p.back() * lin);
  }
  const auto& t = table();
  Jet r(nvars_, order_);
  for (int idx = 0; idx < t.count; ++idx) {
    const double ci = c_[static_cast<std::size_t>(idx)];
    if (ci == 0.0) continue;
    const std::uint8_t* e = t.mono(idx);
    Jet term = Jet::constant(nvars_, order_, ci);
    for (int v = 0; v < nvars_; ++v)
      if (e[v] > 0) term = term * powers[static_cast<std::size_t>(v)][e[v]];
    r += term;
  }
  return r;
}

double Jet::eval(std::span<const double> dx) const {
  if (static_cast<int>(dx.size()) != nvars_) throw Error(Errc::shape, "evaluation point length mismatch");
  const auto& t = table();
  double acc = 0.0;
  for (int i = 0; i < t.count; ++i) {
    const double ci = c_[static_cast<std::size_t>(i)];
    if (ci == 0.0) continue;
    const std::uint8_t* e = t.mono(i);
    double m = ci;
    for (int v = 0; v < nvars_; ++v)
      for (int k = 0; k < e[v]; ++k) m *= dx[static_cast<std::size_t>(v)];
    acc += m;
  }
  return acc;
}

double Jet::max_abs() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

Jet jet_apply_analytic(AnalyticFn f, const Jet& a) {
  const int order = a.order();
  const double a0 = a.value();
  std::vector<double> t(static_cast<std::size_t>(order) + 1, 0.0);
  switch (f) {
    case AnalyticFn::exp: {
      double fact = 1.0;
      const double e0 = std::exp(a0);
      for (int m = 0; m <= order; ++m) {
        if (m > 0) fact *= m;
        t[static_cast<std::size_t>(m)] = e0 / fact;
      }
      break;
    }
    case AnalyticFn::log: {
      if (a0 <= 0.0) throw Error(Errc::domain, "log of a jet with non-positive constant term");
      t[0] = std::log(a0);
      double p = 1.0;  // a0^m
      for (int m = 1; m <= order; ++m) {
        p *= a0;
        t[static_cast<std::size_t>(m)] = ((m % 2 == 1) ? 1.0 : -1.0) / (m * p);
      }
      break;
    }
    case AnalyticFn::sin:
    case AnalyticFn::cos: {
      const double s0 = std::sin(a0);
      const double c0 = std::cos(a0);
      double fact = 1.0;
      for (int m = 0; m <= order; ++m) {
        if (m > 0) fact *= m;
        const int phase = (f == AnalyticFn::sin) ? m % 4 : (m + 1) % 4;
        double d = 0.0;
        switch (phase) {
          case 0: d = s0; break;
          case 1: d = c0; break;
          case 2: d = -s0; break;
          case 3: d = -c0; break;
        }
        t[static_cast<std::size_t>(m)] = d / fact;
      }
      break;
    }
    case AnalyticFn::sqrt: {
      if (a0 < 0.0) throw Error(Errc::domain, "sqrt of a jet with negative constant term");
      if (a0 == 0.0 && order > 0) throw Error(Errc::domain, "sqrt of a jet with zero constant term at positive order");
      t[0] = std::sqrt(a0);
      for (int m = 1; m <= order; ++m)
        t[static_cast<std::size_t>(m)] = t[static_cast<std::size_t>(m - 1)] * (1.5 - m) / (m * a0);
      break;
    }
  }
  // Horner in the nilpotent part z = a - a0
  Jet z = a - a0;
  Jet r = Jet::constant(a.nvars(), order, t[static_cast<std::size_t>(order)]);
  for (int m = order - 1; m >= 0; --m) r = r * z + t[static_cast<std::size_t>(m)];
  return r;
}

Jet jet_exp(const Jet& a) { return jet_apply_analytic(AnalyticFn::exp, a); }
Jet jet_log(const Jet& a) { return jet_apply_analytic(AnalyticFn::log, a); }
Jet jet_sin(const Jet& a) { return jet_apply_analytic(AnalyticFn::sin, a); }
Jet jet_cos(const Jet& a) { return jet_apply_analytic(AnalyticFn::cos, a); }
Jet jet_sqrt(const Jet& a) { return jet_apply_analytic(AnalyticFn::sqrt, a); }

double UniSeries::eval(double t) const {
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
  return acc;
}

UniSeries UniSeries::truncated(int new_order) const {
  UniSeries r(new_order);
  for (int i = 0; i <= new_order && i <= order(); ++i) r.c[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)];
  return r;
}

UniSeries UniSeries::derivative() const {
  if (order() < 1) return UniSeries(0);
  UniSeries r(order() - 1);
  for (int k = 1; k <= order(); ++k) r.c[static_cast<std::size_t>(k - 1)] = k * c[static_cast<std::size_t>(k)];
  return r;
}

UniSeries UniSeries::antiderivative(double value_at_zero) const {
  UniSeries r(order() + 1);
  r.c[0] = value_at_zero;
  for (int k = 0; k <= order(); ++k) r.c[static_cast<std::size_t>(k + 1)] = c[static_cast<std::size_t>(k)] / (k + 1.0);
  return r;
}

UniSeries UniSeries::operator+(const UniSeries& o) const {
  if (order() != o.order()) throw Error(Errc::shape, "series order mismatch");
  UniSeries r = *this;
  for (std::size_t i = 0; i < c.size(); ++i) r.c[i] += o.c[i];
  return r;
}

UniSeries UniSeries::operator-(const UniSeries& o) const {
  if (order() != o.order()) throw Error(Errc::shape, "series order mismatch");
  UniSeries r = *this;
  for (std::size_t i = 0; i < c.size(); ++i) r.c[i] -= o.c[i];
  return r;
}

UniSeries UniSeries::operator*(double s) const {
  UniSeries r = *this;
  for (auto& v : r.c) v *= s;
  return r;
}

Jet UniSeries::to_jet() const {
  Jet j(1, order());
  for (int k = 0; k <= order(); ++k) j.raw(k) = c[static_cast<std::size_t>(k)];
  return j;
}

UniSeries UniSeries::from_jet(const Jet& j) {
  if (j.nvars() != 1) throw Error(Errc::shape, "series conversion needs a 1-variable jet");
  UniSeries r(j.order());
  for (int k = 0; k <= j.order(); ++k) r.c[static_cast<std::size_t>(k)] = j[k];
  return r;
}

}  // namespace fman
