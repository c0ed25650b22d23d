// test_leading.cpp — pairings, threshold, charge combinatorics, monochromatic limit
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "photoion/leading.hpp"
#include "photoion/quad.hpp"

using namespace photoion;
using leading::Regime;

namespace {

std::function<cd(const Vec3&)> isotropic(int dim) {
  const double c = dim == 1 ? 1.0 / std::sqrt(2.0) : 1.0 / std::sqrt(4.0 * oracle::kPi);
  return [c](const Vec3&) -> cd { return c; };
}

leading::ContinuumOrbital orbital(double center, double width, int dim) {
  return leading::monochromatic_orbital(center, width, leading::bump_profile(), isotropic(dim), dim);
}

MomentumRegion radial(double lo, double hi) {
  MomentumRegion r;
  r.p_min = lo;
  r.p_max = hi;
  return r;
}

MomentumRegion everywhere() {
  MomentumRegion r;
  r.all_space = true;
  return r;
}

}  // namespace

TEST_CASE("pairing vanishes below threshold and off the shell") {
  const auto spec = model::preset("gaussian-toy", {{"e0", -1.0}});
  const auto phi = orbital(2.5, 0.5, 1);
  // p^2 - E0 < 0
  const auto below = leading::pair_L(Vec3(0.3, 0, 0), phi, spec, 0.5, Regime::infinity);
  CHECK(below.value == cd(0.0));
  CHECK(below.shell_part == cd(0.0));
  // omega(supp phi) = [0.5, 0.6] and p^2 - E0 = 0.8
  const auto narrow = orbital(0.55, 0.1, 1);
  const auto off = leading::pair_L(Vec3(0.0, 0, 0), narrow, spec, -0.8, Regime::infinity);
  CHECK(off.value == cd(0.0));
  const auto inf = leading::pair_L(Vec3(1.2, 0, 0), phi, spec, -1.0, Regime::infinity);
  CHECK(inf.pv_part == cd(0.0));
  CHECK(inf.value == inf.shell_part);
  const auto zero = leading::pair_L(Vec3(1.2, 0, 0), phi, spec, -1.0, Regime::zero);
  CHECK(std::abs(zero.value - zero.shell_part - zero.pv_part) < 1e-15);
  CHECK(std::abs(inf.value) > 0.0);
}

TEST_CASE("d = 3 pairing against an epsilon-regularized oracle") {
  const auto spec = model::preset("gaussian-toy", {{"e0", -1.0}, {"dim", 3.0}});
  const auto phi = orbital(2.5, 0.5, 3);
  const Vec3 p(0.4, -0.7, std::sqrt(1.4 - 0.16 - 0.49));
  const double rs = p.squaredNorm() + 1.0;
  // -i 4 pi int r^2 rho(p, r) phi(r) / (r* - r + i eps) dr, isotropic in k
  auto f = [&](double r) { return 4.0 * oracle::kPi * r * r * spec.rho_hat(p, Vec3(0, 0, r)) * phi.phi(Vec3(0, 0, r)); };
  auto regularized = [&](double eps) {
    auto re = [&](double r) { return (f(r) / cd(rs - r, eps)).real(); };
    auto im = [&](double r) { return (f(r) / cd(rs - r, eps)).imag(); };
    const double d = 60.0 * eps;
    cd acc = 0.0;
    acc += cd(oracle::integrate(re, phi.r_min, rs - d, 200), oracle::integrate(im, phi.r_min, rs - d, 200));
    acc += cd(oracle::integrate(re, rs - d, rs + d, 400), oracle::integrate(im, rs - d, rs + d, 400));
    acc += cd(oracle::integrate(re, rs + d, phi.r_max, 200), oracle::integrate(im, rs + d, phi.r_max, 200));
    return cd(0.0, -1.0) * acc;
  };
  const cd e1 = regularized(1e-1), e2 = regularized(1e-2), e3 = regularized(1e-3);
  // Richardson on the linear-in-eps leading error
  const cd extrap = e3 + (e3 - e2) / 9.0;
  (void)e1;
  const auto lib = leading::pair_L(p, phi, spec, -1.0, Regime::zero);
  CHECK(std::abs(lib.value - extrap) < 0.005 * std::abs(extrap));
  // the shell part alone: 2 pi r*^2 * 4 pi rho phi kappa-weighted
  const auto inf = leading::pair_L(p, phi, spec, -1.0, Regime::infinity);
  CHECK(std::abs(inf.value) == doctest::Approx(2.0 * oracle::kPi * std::abs(f(rs))).epsilon(1e-8));
}

TEST_CASE("shell function: d = 3 isotropic reduction of the d = 1 value") {
  const auto s1 = model::preset("gaussian-toy", {{"e0", -1.0}});
  const auto s3 = model::preset("gaussian-toy", {{"e0", -1.0}, {"dim", 3.0}});
  // same radial profile g, constant angular factors 2^{-1/2} (d = 1) and (4 pi)^{-1/2} (d = 3)
  auto g = [](double r) { return std::exp(-(r - 2.5) * (r - 2.5)); };
  const double area = quad::sphere_monomial_moment(0, 0, 0);
  leading::ContinuumOrbital phi1{[&](const Vec3& k) -> cd { return g(k.norm()) / std::sqrt(2.0); }, 1.5, 3.5};
  leading::ContinuumOrbital phi3{[&](const Vec3& k) -> cd { return g(k.norm()) / std::sqrt(area); }, 1.5, 3.5};
  const double r = 2.4;
  const cd a = leading::shell_function(Vec3(0.8, 0, 0), r, phi1, s1);
  const cd b = leading::shell_function(Vec3(0.8, 0, 0), r, phi3, s3);
  // directions: two points in d = 1 against the sphere area in d = 3
  const double ratio = (area / std::sqrt(area)) / (2.0 / std::sqrt(2.0));
  CHECK(std::abs(b / a - cd(ratio)) < 1e-10 * ratio);
}

TEST_CASE("threshold: below-threshold clouds carry no charge in regime infinity") {
  const auto spec = model::preset("gaussian-toy", {{"e0", -1.0}});
  const auto phi = orbital(0.6, 0.4, 1);  // omega in (0.4, 0.8), below -E0 = 1
  leading::ContinuumCloud c{{phi}, {1}};
  CHECK(leading::charge_Q(c, everywhere(), spec, -1.0, Regime::infinity) == 0.0);
  CHECK(leading::charge_Q(c, everywhere(), spec, -1.0, Regime::zero) > 0.0);
}

TEST_CASE("charge is supported exactly on the annulus") {
  const auto spec = model::preset("gaussian-toy", {{"e0", -1.0}});
  const auto phi = orbital(2.5, 0.5, 1);  // p^2 in [1.25, 1.75]
  leading::ContinuumCloud c{{phi}, {1}};
  const double lo = std::sqrt(1.25), hi = std::sqrt(1.75);
  const double all = leading::charge_Q(c, everywhere(), spec, -1.0, Regime::infinity);
  CHECK(all > 0.0);
  CHECK(leading::charge_Q(c, radial(0.0, lo - 1e-9), spec, -1.0, Regime::infinity) == 0.0);
  CHECK(leading::charge_Q(c, radial(hi + 1e-9, 10.0), spec, -1.0, Regime::infinity) == 0.0);
  const double inner = leading::charge_Q(c, radial(0.0, 1.2), spec, -1.0, Regime::infinity);
  const double outer = leading::charge_Q(c, radial(1.2, std::numeric_limits<double>::infinity()), spec, -1.0,
                                         Regime::infinity);
  CHECK(inner > 0.0);
  CHECK(outer > 0.0);
  CHECK(std::abs(inner + outer - all) < 1e-10 * all);
  MomentumRegion right = everywhere();
  right.all_space = false;
  right.signs = {1};
  CHECK(leading::charge_Q(c, right, spec, -1.0, Regime::infinity) == doctest::Approx(0.5 * all).epsilon(1e-10));
}

TEST_CASE("charge combinatorics and additivity") {
  const auto spec = model::preset("gaussian-toy", {{"e0", -1.0}});
  const auto phi1 = orbital(2.5, 0.5, 1), phi2 = orbital(1.6, 0.4, 1);
  for (Regime reg : {Regime::infinity, Regime::zero}) {
    const double q1 = leading::charge_Q({{phi1}, {1}}, everywhere(), spec, -1.0, reg);
    const double q1x2 = leading::charge_Q({{phi1}, {2}}, everywhere(), spec, -1.0, reg);
    CHECK(std::abs(q1x2 - 4.0 * q1) < 1e-10 * std::max(1.0, q1));
    const double q2 = leading::charge_Q({{phi2}, {1}}, everywhere(), spec, -1.0, reg);
    const double q12 = leading::charge_Q({{phi1, phi2}, {1, 1}}, everywhere(), spec, -1.0, reg);
    CHECK(std::abs(q12 - q1 - q2) < 1e-10 * std::max(1.0, q12));
    CHECK(q1 == doctest::Approx(leading::orbital_charge(phi1, everywhere(), spec, -1.0, reg)).epsilon(1e-14));
  }
  const auto overlap = orbital(2.4, 0.5, 1);
  const Mat G = leading::cloud_gram({{phi1, overlap}, {1, 1}}, 1);
  CHECK(std::abs(G(0, 0) - cd(1.0)) < 1e-10);
  CHECK(std::abs(G(0, 1)) > 0.1);
  CHECK_THROWS_AS(leading::charge_Q({{phi1, overlap}, {1, 1}}, everywhere(), spec, -1.0, Regime::infinity),
                  ConfigError);
}

TEST_CASE("plus-i0 energy of the bump profile") {
  const auto chi = leading::bump_profile();
  const double l2 = oracle::integrate([&](double x) { return chi(x) * chi(x); }, -0.5, 0.5, 40);
  CHECK(l2 == doctest::Approx(1.0).epsilon(1e-10));
  const double lib = leading::profile_integral(chi, false);
  const double ref = oracle::plus_i0_energy(chi, 400.0);
  CHECK(std::abs(lib - 2.0 * oracle::kPi * oracle::kPi) < 1e-3);
  CHECK(std::abs(ref - 2.0 * oracle::kPi * oracle::kPi) < 1e-3);
  CHECK(std::abs(lib - ref) < 1e-3);
  // the transform itself: imaginary part is -pi chi(y)
  for (double y : {-0.3, 0.0, 0.2}) CHECK(leading::plus_i0_transform(chi, y).imag() == doctest::Approx(-oracle::kPi * chi(y)));
}

TEST_CASE("monochromatic limit") {
  const auto spec = model::preset("gaussian-toy", {{"e0", -1.0}});
  const auto chi = leading::bump_profile();
  const auto below = leading::monochromatic(0.5, chi, isotropic(1), everywhere(), spec, -1.0);
  CHECK(below.mono_case == leading::MonoCase::below);
  CHECK(below.limit_charge == 0.0);
  const auto above = leading::monochromatic(2.0, chi, isotropic(1), everywhere(), spec, -1.0);
  CHECK(above.mono_case == leading::MonoCase::above);
  CHECK(above.limit_charge == doctest::Approx(above.theta0 * above.I_value).epsilon(1e-14));
  const auto rows = leading::monochromatic_sweep(2.0, {0.1, 0.05, 0.025}, chi, isotropic(1), everywhere(), spec, -1.0);
  REQUIRE(rows.size() == 3);
  const double lim = above.limit_charge;
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(std::abs(rows[i].charge - lim) < std::abs(rows[i - 1].charge - lim));
  CHECK(std::abs(rows[2].charge - lim) < 0.01 * lim);
}

TEST_CASE("theta function for a constant angular profile") {
  const auto spec = model::preset("gaussian-toy", {{"e0", -1.0}, {"dim", 3.0}});
  const Vec3 p(0.2, 0.5, -0.4);
  for (double r : {0.7, 2.0}) {
    const double omega = 1.5;
    const cd th = leading::theta_function(p, r, omega, isotropic(3), spec);
    const cd expect = cd(0.0, -1.0) * (r * r / omega) * spec.rho_hat(p, Vec3(r, 0, 0)) * std::sqrt(4.0 * oracle::kPi);
    CHECK(std::abs(th - expect) < 1e-12 * std::abs(expect));
  }
}
