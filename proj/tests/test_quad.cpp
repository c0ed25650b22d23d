// test_quad.cpp — quadrature rules, principal values, sphere rules, damped time integrals
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "photoion/quad.hpp"

using namespace photoion;

namespace {

cd pv_const(double a, double b, double s, int order) {
  quad::PVProblem p;
  p.integrand = [](double) { return cd(1.0); };
  p.a = a;
  p.b = b;
  p.s = s;
  p.subtraction_order = order;
  return quad::pv_integral(p, 1e-13);
}

double sphere_moment_gamma(int a, int b, int c) {
  // 2 Gamma(A) Gamma(B) Gamma(C) / Gamma(A + B + C), A = (a+1)/2 ...; zero if any exponent is odd
  if (a % 2 || b % 2 || c % 2) return 0.0;
  const double A = 0.5 * (a + 1), B = 0.5 * (b + 1), C = 0.5 * (c + 1);
  return 2.0 * std::tgamma(A) * std::tgamma(B) * std::tgamma(C) / std::tgamma(A + B + C);
}

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 3, 8, 20}) {
    const auto r = quad::gauss_legendre(n, -0.3, 1.7);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double acc = 0.0;
      for (std::size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * std::pow(r.x[i], deg);
      const double exact = (std::pow(1.7, deg + 1) - std::pow(-0.3, deg + 1)) / (deg + 1);
      CHECK(acc == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("adaptive quadrature on smooth, peaked and semi-infinite integrands") {
  const auto a = quad::adaptive([](double x) { return std::exp(-x * x); }, -6.0, 6.0, 1e-13);
  CHECK(std::abs(a.value - std::sqrt(oracle::kPi)) < 1e-12);
  const auto b = quad::adaptive([](double x) { return 1e-3 / (x * x + 1e-6); }, -1.0, 1.0, 1e-11);
  CHECK(std::abs(b.value - 2.0 * std::atan(1000.0)) < 1e-10);
  const auto c = quad::adaptive_to_infinity([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1e-12);
  CHECK(std::abs(c.value - 0.5 * oracle::kPi) < 1e-11);
  Vec v(2);
  v << 1.0, cd(0.0, -3.0);
  const auto d = quad::adaptive([&](double x) { return Vec(v * std::cos(x)); }, 0.0, 1.0, 1e-13);
  CHECK((d.value - v * std::sin(1.0)).norm() < 1e-12);
  CHECK_THROWS_AS(quad::adaptive([](double x) { return x; }, 0.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("principal value golden values") {
  for (int order : {0, 1}) {
    CHECK(std::abs(pv_const(-1.0, 1.0, 0.0, order)) < 1e-10);
    CHECK(std::abs(pv_const(0.0, 2.0, 1.0, order)) < 1e-10);
    CHECK(std::abs(pv_const(-1.0, 1.0, 0.5, order) - cd(-std::log(3.0))) < 1e-10);
  }
  CHECK_THROWS_AS(pv_const(0.0, 1.0, 1.0, 0), ConfigError);
  CHECK_THROWS_AS(pv_const(0.0, 1.0, 0.5, 2), ConfigError);
}

TEST_CASE("principal value against the closed-form antiderivative") {
  // PV int_a^b x^2/(x-s) dx = (b^2-a^2)/2 + s(b-a) + s^2 ln|(b-s)/(a-s)|
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = -1.0, b = 2.0, s = a + (b - a) * u(rng);
    quad::PVProblem p;
    p.integrand = [](double x) { return cd(x * x); };
    p.a = a;
    p.b = b;
    p.s = s;
    p.subtraction_order = trial % 2;
    const double exact = 0.5 * (b * b - a * a) + s * (b - a) + s * s * std::log(std::abs((b - s) / (a - s)));
    CHECK(std::abs(quad::pv_integral(p, 1e-13) - cd(exact)) < 1e-10);
  }
}

TEST_CASE("sphere rule golden values") {
  auto one = [](const Vec3&) { return cd(1.0); };
  auto z2 = [](const Vec3& s) { return cd(s[2] * s[2]); };
  CHECK(std::abs(quad::sphere_integral(one, 6).value - cd(4.0 * oracle::kPi)) < 1e-12);
  CHECK(std::abs(quad::sphere_integral(z2, 6).value - cd(4.0 * oracle::kPi / 3.0)) < 1e-12);
  CHECK(std::abs(quad::sphere_integral(one, 3, 1).value - cd(2.0)) < 1e-15);
}

TEST_CASE("sphere rule is exact on degree-6 polynomials") {
  // p = x^2 y^2 z^2 + 3 x^6 - 2 x^4 z^2 + x y z^4 (odd term integrates to zero)
  auto p = [](const Vec3& s) {
    const double x = s[0], y = s[1], z = s[2];
    return cd(x * x * y * y * z * z + 3 * std::pow(x, 6) - 2 * std::pow(x, 4) * z * z + x * y * std::pow(z, 4));
  };
  const double exact = sphere_moment_gamma(2, 2, 2) + 3 * sphere_moment_gamma(6, 0, 0) -
                       2 * sphere_moment_gamma(4, 0, 2);
  CHECK(std::abs(quad::sphere_integral(p, 8).value - cd(exact)) < 1e-12);
  CHECK(quad::sphere_monomial_moment(2, 2, 2) == doctest::Approx(sphere_moment_gamma(2, 2, 2)).epsilon(1e-14));
  CHECK(quad::sphere_monomial_moment(1, 2, 2) == 0.0);
}

TEST_CASE("sphere rule weights sum to the sphere area") {
  for (int order : {1, 2, 5, 9}) {
    const auto r = quad::sphere_rule(order);
    double s = 0.0;
    for (double w : r.weights) s += w;
    CHECK(s == doctest::Approx(4.0 * oracle::kPi).epsilon(1e-13));
    for (const auto& d : r.directions) CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("damped time integral: exponential decay") {
  Vec v(2);
  v << 1.0, cd(0.0, 2.0);
  const double T = 10.0;
  const auto r = quad::damped_time_integral([&](double s) { return Vec(std::exp(-s) * v); }, 2.0, T, 1e-12);
  CHECK((r.value - v * (1.0 - std::exp(-T))).norm() < 1e-11);
  CHECK(r.tail_bound >= v.norm() * std::exp(-T));
}

TEST_CASE("damped time integral: power-law decay") {
  Vec v(2);
  v << 1.0, cd(0.0, 2.0);
  const double T = 100.0;
  const auto r =
      quad::damped_time_integral([&](double s) { return Vec(v / std::pow(1.0 + s, 2)); }, 2.0, T, 1e-12);
  CHECK((r.value - v * (1.0 - 1.0 / (1.0 + T))).norm() < 1e-11);
  CHECK(r.fitted_exponent == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(r.tail_bound == doctest::Approx(v.norm() / (1.0 + T)).epsilon(1e-3));
}

TEST_CASE("damped time integral: oscillatory integrand against a fine-grid oracle") {
  Vec v(2);
  v << 1.0, cd(0.0, 2.0);
  const double T = 1000.0;
  const auto r = quad::damped_time_integral(
      [&](double s) { return Vec(std::exp(cd(0.0, s)) * v / std::pow(1.0 + s, 2)); }, 2.0, T, 1e-10);
  const double re = oracle::integrate([](double s) { return std::cos(s) / std::pow(1 + s, 2); }, 0, T, 4000);
  const double im = oracle::integrate([](double s) { return std::sin(s) / std::pow(1 + s, 2); }, 0, T, 4000);
  CHECK((r.value - v * cd(re, im)).norm() < 1e-10);
  CHECK(r.tail_bound >= 0.0);
}

TEST_CASE("damped time integral rejects slow decay") {
  Vec v = Vec::Ones(1);
  CHECK_THROWS_AS(quad::damped_time_integral([&](double s) { return Vec(v / std::sqrt(1.0 + s)); }, 2.0, 100.0, 1e-8),
                  ConvergenceError);
  CHECK_THROWS_AS(quad::damped_time_integral([&](double) { return v; }, 1.0, 1.0, 1e-8), ConfigError);
}
