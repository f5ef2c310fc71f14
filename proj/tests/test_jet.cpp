#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "fman/jet.hpp"

using namespace fman;

namespace {

Jet random_jet(std::mt19937_64& rng, int nvars, int order, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Jet j(nvars, order);
  for (int i = 0; i < j.size(); ++i) j.raw(i) = d(rng);
  return j;
}

using Fn2 = std::function<double(double, double)>;

// central difference in variable `var`, Richardson-extrapolated once
Fn2 diff(Fn2 f, int var, double h = 1e-2) {
  auto d = [](Fn2 g, int v, double step) -> Fn2 {
    return [g, v, step](double x, double y) {
      return v == 0 ? (g(x + step, y) - g(x - step, y)) / (2 * step) : (g(x, y + step) - g(x, y - step)) / (2 * step);
    };
  };
  Fn2 Dh = d(f, var, h);
  Fn2 Dh2 = d(f, var, h / 2);
  return [Dh, Dh2](double x, double y) { return (4 * Dh2(x, y) - Dh(x, y)) / 3; };
}

// Taylor coefficient of f at (x0,y0) for multi-index (a,b) via finite differences
double fd_coeff(Fn2 f, double x0, double y0, int a, int b) {
  Fn2 g = f;
  double fact = 1.0;
  for (int i = 0; i < a; ++i) g = diff(g, 0);
  for (int i = 0; i < b; ++i) g = diff(g, 1);
  for (int i = 2; i <= a; ++i) fact *= i;
  for (int i = 2; i <= b; ++i) fact *= i;
  return g(x0, y0) / fact;
}

void check_against_fd(const Jet& j, Fn2 f, double x0, double y0, double rel = 1e-6) {
  for (int a = 0; a + 0 <= 3; ++a)
    for (int b = 0; a + b <= 3; ++b) {
      if (a + b > j.order()) continue;
      int alpha[2] = {a, b};
      double jet_c = j.coeff(std::span<const int>(alpha, 2));
      double fd_c = fd_coeff(f, x0, y0, a, b);
      double scale = std::max({1.0, std::abs(jet_c), std::abs(fd_c)});
      CHECK(std::abs(jet_c - fd_c) / scale < rel);
    }
}

}  // namespace

TEST_CASE("binomial square") {
  Jet one_plus_x = Jet::variable(1, 2, 0, 1.0);  // 1 + x
  Jet sq = one_plus_x * one_plus_x;
  CHECK(sq[0] == doctest::Approx(1.0));
  CHECK(sq[1] == doctest::Approx(2.0));
  CHECK(sq[2] == doctest::Approx(1.0));
}

TEST_CASE("ring unit") {
  std::mt19937_64 rng(7);
  Jet a = random_jet(rng, 2, 3);
  Jet one = Jet::constant(2, 3, 1.0);
  Jet prod = a * one;
  for (int i = 0; i < a.size(); ++i) CHECK(prod[i] == doctest::Approx(a[i]));
}

TEST_CASE("product matches finite differences") {
  // two analytic functions and their jet counterparts at (0.3, -0.2)
  const double x0 = 0.3, y0 = -0.2;
  Jet x = Jet::variable(2, 3, 0, x0);
  Jet y = Jet::variable(2, 3, 1, y0);
  Jet a = jet_exp(x) * (y + 2.0);
  Jet b = jet_sin(y) + x * x;
  Fn2 fa = [](double u, double v) { return std::exp(u) * (v + 2.0); };
  Fn2 fb = [](double u, double v) { return std::sin(v) + u * u; };
  Fn2 fp = [fa, fb](double u, double v) { return fa(u, v) * fb(u, v); };
  check_against_fd(a * b, fp, x0, y0);
}

TEST_CASE("geometric series") {
  Jet one = Jet::constant(1, 3, 1.0);
  Jet denom = one - Jet::variable(1, 3, 0, 0.0);
  Jet g = one / denom;
  for (int i = 0; i <= 3; ++i) CHECK(g[i] == doctest::Approx(1.0));
}

TEST_CASE("self-division") {
  std::mt19937_64 rng(11);
  Jet a = random_jet(rng, 2, 3);
  a.raw(0) = 1.0;
  Jet q = a / a;
  CHECK(q[0] == doctest::Approx(1.0));
  for (int i = 1; i < q.size(); ++i) CHECK(std::abs(q[i]) < 1e-13);
}

TEST_CASE("ratio of equal exponentials is the unit jet") {
  Jet s = Jet::variable(1, 4, 0, 0.0);
  Jet num = jet_exp(-s);
  Jet q = num / jet_exp(-s);
  CHECK(q[0] == doctest::Approx(1.0));
  for (int i = 1; i <= 4; ++i) CHECK(std::abs(q[i]) < 1e-14);
}

TEST_CASE("exp jets") {
  Jet zero(1, 3);
  Jet u = jet_exp(zero);
  CHECK(u[0] == doctest::Approx(1.0));
  for (int i = 1; i <= 3; ++i) CHECK(u[i] == doctest::Approx(0.0));

  Jet s = Jet::variable(1, 2, 0, 0.0);
  Jet em = jet_exp(-s);
  CHECK(em[0] == doctest::Approx(1.0));
  CHECK(em[1] == doctest::Approx(-1.0));
  CHECK(em[2] == doctest::Approx(0.5));
}

TEST_CASE("analytic functions match finite differences") {
  const double x0 = 0.4, y0 = 0.1;
  Jet x = Jet::variable(2, 3, 0, x0);
  Jet y = Jet::variable(2, 3, 1, y0);
  Jet arg = x * y + x + 1.5;
  Fn2 farg = [](double u, double v) { return u * v + u + 1.5; };
  check_against_fd(jet_sin(arg), [farg](double u, double v) { return std::sin(farg(u, v)); }, x0, y0);
  check_against_fd(jet_cos(arg), [farg](double u, double v) { return std::cos(farg(u, v)); }, x0, y0);
  check_against_fd(jet_log(arg), [farg](double u, double v) { return std::log(farg(u, v)); }, x0, y0);
  check_against_fd(jet_sqrt(arg), [farg](double u, double v) { return std::sqrt(farg(u, v)); }, x0, y0);
  check_against_fd(jet_exp(arg), [farg](double u, double v) { return std::exp(farg(u, v)); }, x0, y0);
}

TEST_CASE("partial derivatives") {
  // d/dx of 1 + 2x + x^2 = 2 + 2x
  Jet x = Jet::variable(1, 2, 0, 0.0);
  Jet p = x * x + 2.0 * x + 1.0;
  Jet dp = p.partial(0);
  CHECK(dp[0] == doctest::Approx(2.0));
  CHECK(dp[1] == doctest::Approx(2.0));

  std::mt19937_64 rng(3);
  Jet a = random_jet(rng, 3, 3);
  Jet dxy = a.partial(0).partial(1);
  Jet dyx = a.partial(1).partial(0);
  for (int i = 0; i < dxy.size(); ++i) CHECK(dxy[i] == doctest::Approx(dyx[i]));

  Jet s = Jet::variable(1, 4, 0, 0.7);
  Jet es = jet_exp(s);
  Jet des = es.partial(0);
  Jet es3 = es.truncated(3);
  for (int i = 0; i < des.size(); ++i) CHECK(des[i] == doctest::Approx(es3[i]));
}

TEST_CASE("ring axioms on random jets") {
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 20; ++rep) {
    Jet a = random_jet(rng, 2, 4);
    Jet b = random_jet(rng, 2, 4);
    Jet c = random_jet(rng, 2, 4);
    Jet lhs = (a * b) * c;
    Jet rhs = a * (b * c);
    CHECK((lhs - rhs).max_abs() < 1e-13);
    CHECK((a * (b + c) - (a * b + a * c)).max_abs() < 1e-13);
    CHECK((a * b - b * a).max_abs() < 1e-13);
  }
}

TEST_CASE("division round trip") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    Jet a = random_jet(rng, 2, 4);
    Jet b = random_jet(rng, 2, 4);
    b.raw(0) = (b[0] < 0 ? -1.0 : 1.0) * (std::abs(b[0]) + 0.5);
    Jet q = a / b;
    CHECK((q * b - a).max_abs() < 1e-12 * std::max(1.0, a.max_abs()));
  }
}

TEST_CASE("Leibniz and chain rules") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    Jet a = random_jet(rng, 2, 4);
    Jet b = random_jet(rng, 2, 4);
    for (int v = 0; v < 2; ++v) {
      Jet lhs = (a * b).partial(v);
      Jet rhs = a.partial(v) * b.truncated(3) + a.truncated(3) * b.partial(v);
      CHECK((lhs - rhs).max_abs() < 1e-12);
    }
    Jet ea = jet_exp(a);
    Jet lhs = ea.partial(0);
    Jet rhs = ea.truncated(3) * a.partial(0);
    CHECK((lhs - rhs).max_abs() < 1e-12 * std::max(1.0, ea.max_abs()));
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(Jet(1, 2) + Jet(2, 2), Error);
  CHECK_THROWS_AS(Jet(1, 2) + Jet(1, 3), Error);
  CHECK_THROWS_AS(Jet::constant(1, 2, 1.0) / Jet::variable(1, 2, 0, 0.0), Error);
  CHECK_THROWS_AS(jet_log(Jet::constant(1, 2, -1.0)), Error);
  CHECK_THROWS_AS(jet_log(Jet::constant(1, 2, 0.0)), Error);
  CHECK_THROWS_AS(jet_sqrt(Jet::constant(1, 2, -0.5)), Error);
  CHECK_THROWS_AS(jet_sqrt(Jet::variable(1, 2, 0, 0.0)), Error);
  CHECK_THROWS_AS(Jet::constant(1, 0, 1.0).partial(0), Error);
  CHECK_NOTHROW(jet_sqrt(Jet::constant(1, 0, 0.0)));
}

TEST_CASE("integer powers") {
  Jet s = Jet::variable(1, 4, 0, 0.5);
  Jet p = s.pow_int(3);
  Jet expect = s * s * s;
  CHECK((p - expect).max_abs() < 1e-14);
  Jet pn = s.pow_int(-2);
  Jet expect2 = Jet::constant(1, 4, 1.0) / (s * s);
  CHECK((pn - expect2).max_abs() < 1e-12);
  CHECK((s.pow_int(0) - Jet::constant(1, 4, 1.0)).max_abs() == 0.0);
}

TEST_CASE("shift recenters the polynomial") {
  std::mt19937_64 rng(41);
  Jet a = random_jet(rng, 2, 4);
  double off[2] = {0.3, -0.2};
  Jet b = a.shifted(std::span<const double>(off, 2), 4);
  // evaluating b at t equals evaluating a at t+off
  double t[2] = {0.05, 0.07};
  double t_shift[2] = {t[0] + off[0], t[1] + off[1]};
  CHECK(b.eval(std::span<const double>(t, 2)) ==
        doctest::Approx(a.eval(std::span<const double>(t_shift, 2))).epsilon(1e-12));
}

TEST_CASE("linear composition") {
  std::mt19937_64 rng(43);
  Jet a = random_jet(rng, 2, 4);
  std::vector<std::vector<double>> L = {{1.0, 2.0}, {0.5, -1.0}};
  Jet b = a.compose_linear(L);
  double y[2] = {0.04, -0.03};
  double x[2] = {L[0][0] * y[0] + L[0][1] * y[1], L[1][0] * y[0] + L[1][1] * y[1]};
  CHECK(b.eval(std::span<const double>(y, 2)) ==
        doctest::Approx(a.eval(std::span<const double>(x, 2))).epsilon(1e-12));
}

TEST_CASE("one-variable series") {
  UniSeries f({1.0, 1.0});  // 1 + t
  UniSeries F = f.antiderivative(0.0);
  CHECK(F.c == std::vector<double>{0.0, 1.0, 0.5});

  // antiderivative of e^t (1 + t) from 0 equals t e^t
  Jet t = Jet::variable(1, 6, 0, 0.0);
  Jet integrand = jet_exp(t) * (t + 1.0);
  UniSeries I = UniSeries::from_jet(integrand).antiderivative(0.0);
  Jet target = t.truncated(7) * jet_exp(t.truncated(7));
  for (int k = 0; k <= 7; ++k) CHECK(I.c[static_cast<std::size_t>(k)] == doctest::Approx(target[k]).epsilon(1e-13));

  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  UniSeries g(5);
  for (auto& v : g.c) v = d(rng);
  UniSeries round = g.antiderivative(3.14).derivative();
  for (int k = 0; k <= 5; ++k) CHECK(round.c[static_cast<std::size_t>(k)] == doctest::Approx(g.c[static_cast<std::size_t>(k)]));
}
