// quad.hpp — adaptive Gauss–Kronrod, principal values, sphere rules, decaying time integrals
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "photoion/common.hpp"

namespace photoion::quad {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// n-point Gauss–Legendre rule on [-1, 1].
Rule gauss_legendre(int n);

// Gauss–Legendre rule mapped to [a, b].
Rule gauss_legendre(int n, double a, double b);

template <class T>
struct Estimate {
  T value;
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double norm_of(double v) { return std::abs(v); }
inline double norm_of(cd v) { return std::abs(v); }
template <class Derived>
double norm_of(const Eigen::MatrixBase<Derived>& v) {
  return v.norm();
}

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
};

template <class F>
auto gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  auto fc = f(c);
  using T = std::decay_t<decltype(fc)>;
  T kron = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    T f1 = f(c - dx);
    T f2 = f(c + dx);
    kron += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
  }
  T value = kron * h;
  T gval = gauss * h;
  double err = norm_of(T(value - gval));
  return Segment<T>{a, b, std::move(value), err};
}

}  // namespace detail

// Globally adaptive G7K15 on [a, b] with absolute tolerance on the total error.
// Works for double, complex and Eigen vector integrands.
template <class F>
auto adaptive(F&& f, double a, double b, double tol, int max_intervals = 4000) {
  using T = std::decay_t<decltype(f(a))>;
  if (!(tol > 0.0)) throw ConfigError("adaptive: tol must be positive");
  if (a == b) {
    T zero = f(a) * 0.0;
    return Estimate<T>{zero, 0.0, 1};
  }
  std::vector<detail::Segment<T>> segs;
  segs.push_back(detail::gk15(f, a, b));
  int evals = 15;
  auto cmp = [](const auto& l, const auto& r) { return l.error < r.error; };
  double total_err = segs.front().error;
  while (total_err > tol) {
    if (static_cast<int>(segs.size()) >= max_intervals)
      throw ConvergenceError("adaptive quadrature: subdivision budget exhausted (error " +
                             std::to_string(total_err) + " > tol " + std::to_string(tol) + ")");
    std::pop_heap(segs.begin(), segs.end(), cmp);
    auto worst = std::move(segs.back());
    segs.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw ConvergenceError("adaptive quadrature: interval underflow");
    segs.push_back(detail::gk15(f, worst.a, mid));
    std::push_heap(segs.begin(), segs.end(), cmp);
    segs.push_back(detail::gk15(f, mid, worst.b));
    std::push_heap(segs.begin(), segs.end(), cmp);
    evals += 30;
    total_err = 0.0;
    for (const auto& s : segs) total_err += s.error;
  }
  // Sum in interval order so results do not depend on heap layout.
  std::sort(segs.begin(), segs.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  T value = segs.front().value;
  for (std::size_t i = 1; i < segs.size(); ++i) value += segs[i].value;
  return Estimate<T>{std::move(value), total_err, evals};
}

// Integral over [a, inf) via x = a + u/(1-u).
template <class F>
auto adaptive_to_infinity(F&& f, double a, double tol, int max_intervals = 4000) {
  auto g = [&](double u) {
    const double one_minus = 1.0 - u;
    const double x = a + u / one_minus;
    return f(x) * (1.0 / (one_minus * one_minus));
  };
  return adaptive(g, 0.0, 1.0, tol, max_intervals);
}

// ---------------------------------------------------------------------------
// Principal value

struct PVProblem {
  std::function<cd(double)> integrand;
  double a = 0.0;
  double b = 0.0;
  double s = 0.0;
  int subtraction_order = 0;  // 0 or 1
};

// PV integral of f(x)/(x - s) over [a, b] by singularity subtraction.
cd pv_integral(const PVProblem& p, double tol);

// ---------------------------------------------------------------------------
// Sphere

struct SphereRule {
  int dim = 3;
  std::vector<Vec3> directions;
  std::vector<double> weights;
};

// Product Gauss(cos theta) x trapezoid(phi) rule: `order` polar nodes and 2*order
// azimuthal nodes. For dim = 1 the "sphere" is {+1, -1} with unit weights.
SphereRule sphere_rule(int order, int dim = 3);

// Integral of f over the unit sphere; error estimated by comparing order and 2*order.
Estimate<cd> sphere_integral(const std::function<cd(const Vec3&)>& f, int order, int dim = 3);

// Exact moment of x^a y^b z^c over the unit sphere S^2.
double sphere_monomial_moment(int a, int b, int c);

// ---------------------------------------------------------------------------
// Decaying time integrals

struct DampedResult {
  Vec value;
  double tail_bound = 0.0;
  double fitted_exponent = 0.0;  // fitted kappa in |F(s)| ~ C (1+s)^(-kappa)
  double quadrature_error = 0.0;
};

struct DampedOptions {
  bool two_sided = false;   // integrate over [-T, T] instead of [0, T]
  int fit_samples = 41;     // log-spaced samples over the last decade
  int max_intervals = 20000;
};

// Integral of F over [0, T] (or [-T, T]) plus a fitted power-law tail bound
// C (1+T)^(1-kappa) / (kappa - 1). Throws ConvergenceError if the fitted decay
// exponent is not above 1.
DampedResult damped_time_integral(const std::function<Vec(double)>& F, double k_decay,
                                  double horizon, double tol, const DampedOptions& opt = {});

}  // namespace photoion::quad
