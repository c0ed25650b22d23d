// quad.cpp — quadrature primitives
#include "photoion/quad.hpp"

#include <cmath>
#include <limits>

namespace photoion::quad {

Rule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("gauss_legendre: n must be >= 1");
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

Rule gauss_legendre(int n, double a, double b) {
  Rule r = gauss_legendre(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    r.x[i] = c + h * r.x[i];
    r.w[i] *= h;
  }
  return r;
}

cd pv_integral(const PVProblem& p, double tol) {
  if (!(p.a < p.s && p.s < p.b))
    throw ConfigError("pv_integral: singularity must lie strictly inside (a, b)");
  if (p.subtraction_order != 0 && p.subtraction_order != 1)
    throw ConfigError("pv_integral: subtraction_order must be 0 or 1");
  if (!p.integrand) throw ConfigError("pv_integral: empty integrand");
  const auto& f = p.integrand;
  const cd fs = f(p.s);
  cd dfs = 0.0;
  if (p.subtraction_order == 1) {
    const double h = 1e-3 * std::min(p.s - p.a, p.b - p.s);
    dfs = (8.0 * (f(p.s + h) - f(p.s - h)) - (f(p.s + 2 * h) - f(p.s - 2 * h))) / (12.0 * h);
  }
  auto g = [&](double x) -> cd {
    const double d = x - p.s;
    if (d == 0.0) return dfs;
    return (f(x) - fs - dfs * d) / d;
  };
  // split at s so that no Kronrod panel straddles the removable point
  const auto left = adaptive(g, p.a, p.s, 0.5 * tol);
  const auto right = adaptive(g, p.s, p.b, 0.5 * tol);
  cd value = left.value + right.value + fs * std::log((p.b - p.s) / (p.s - p.a));
  if (p.subtraction_order == 1) value += dfs * (p.b - p.a);
  return value;
}

SphereRule sphere_rule(int order, int dim) {
  SphereRule r;
  r.dim = dim;
  if (dim == 1) {
    r.directions = {Vec3(1, 0, 0), Vec3(-1, 0, 0)};
    r.weights = {1.0, 1.0};
    return r;
  }
  if (dim != 3) throw ConfigError("sphere_rule: dim must be 1 or 3");
  if (order < 1) throw ConfigError("sphere_rule: order must be >= 1");
  const Rule gl = gauss_legendre(order);
  const int nphi = 2 * order;
  const double dphi = 2.0 * kPi / nphi;
  r.directions.reserve(static_cast<std::size_t>(order) * nphi);
  r.weights.reserve(static_cast<std::size_t>(order) * nphi);
  for (int i = 0; i < order; ++i) {
    const double ct = gl.x[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < nphi; ++j) {
      const double ph = (j + 0.5) * dphi;
      r.directions.emplace_back(st * std::cos(ph), st * std::sin(ph), ct);
      r.weights.push_back(gl.w[i] * dphi);
    }
  }
  return r;
}

namespace {
cd apply_rule(const SphereRule& r, const std::function<cd(const Vec3&)>& f) {
  cd acc = 0.0;
  for (std::size_t i = 0; i < r.weights.size(); ++i) acc += r.weights[i] * f(r.directions[i]);
  return acc;
}
}  // namespace

Estimate<cd> sphere_integral(const std::function<cd(const Vec3&)>& f, int order, int dim) {
  if (dim == 1) {
    const SphereRule r = sphere_rule(1, 1);
    return {apply_rule(r, f), 0.0, 2};
  }
  const SphereRule lo = sphere_rule(order, dim);
  const SphereRule hi = sphere_rule(2 * order, dim);
  const cd vlo = apply_rule(lo, f);
  const cd vhi = apply_rule(hi, f);
  return {vhi, std::abs(vhi - vlo),
          static_cast<int>(lo.weights.size() + hi.weights.size())};
}

double sphere_monomial_moment(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0) throw ConfigError("sphere_monomial_moment: negative exponent");
  if (a % 2 || b % 2 || c % 2) return 0.0;
  const double la = std::lgamma(0.5 * (a + 1)), lb = std::lgamma(0.5 * (b + 1)),
               lc = std::lgamma(0.5 * (c + 1)), ls = std::lgamma(0.5 * (a + b + c + 3));
  return 2.0 * std::exp(la + lb + lc - ls);
}

DampedResult damped_time_integral(const std::function<Vec(double)>& F, double k_decay,
                                  double horizon, double tol, const DampedOptions& opt) {
  if (!(horizon > 0.0)) throw ConfigError("damped_time_integral: horizon must be positive");
  if (!(k_decay > 1.0)) throw ConfigError("damped_time_integral: K_decay must exceed 1");
  DampedResult out;
  auto f = [&](double s) -> Vec { return F(s); };
  if (opt.two_sided) {
    auto l = adaptive(f, -horizon, 0.0, 0.5 * tol, opt.max_intervals);
    auto r = adaptive(f, 0.0, horizon, 0.5 * tol, opt.max_intervals);
    out.value = l.value + r.value;
    out.quadrature_error = l.error + r.error;
  } else {
    auto r = adaptive(f, 0.0, horizon, tol, opt.max_intervals);
    out.value = std::move(r.value);
    out.quadrature_error = r.error;
  }

  // Power-law fit of |F| over the last decade of log-spaced samples.
  const int n = std::max(opt.fit_samples, 5);
  const double lo = horizon / 10.0;
  std::vector<double> ls, lf, ss, fs;
  for (int i = 0; i < n; ++i) {
    const double s = lo * std::pow(10.0, static_cast<double>(i) / (n - 1));
    double v = F(s).norm();
    if (opt.two_sided) v = std::max(v, F(-s).norm());
    ss.push_back(s);
    fs.push_back(v);
  }
  const double fmax = *std::max_element(fs.begin(), fs.end());
  if (fmax == 0.0) {
    out.tail_bound = 0.0;
    out.fitted_exponent = std::numeric_limits<double>::infinity();
    return out;
  }
  // integrand already at round-off level: the fit carries no information, trust k_decay
  const double scale = std::max(fmax, F(0.0).norm());
  if (fmax <= 1e-13 * scale) {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c = std::max(c, fs[i] * std::pow(1.0 + ss[i], k_decay));
    out.fitted_exponent = std::numeric_limits<double>::infinity();
    out.tail_bound = c * std::pow(1.0 + horizon, 1.0 - k_decay) / (k_decay - 1.0);
    if (opt.two_sided) out.tail_bound *= 2.0;
    return out;
  }
  const double floor = fmax * 1e-300;
  for (int i = 0; i < n; ++i) {
    ls.push_back(std::log1p(ss[i]));
    lf.push_back(std::log(std::max(fs[i], floor)));
  }
  // least squares slope over the last half-decade where the asymptotic regime is best resolved
  const int start = n / 2;
  double mx = 0, my = 0;
  for (int i = start; i < n; ++i) mx += ls[i], my += lf[i];
  const int m = n - start;
  mx /= m;
  my /= m;
  double sxy = 0, sxx = 0;
  for (int i = start; i < n; ++i) sxy += (ls[i] - mx) * (lf[i] - my), sxx += (ls[i] - mx) * (ls[i] - mx);
  const double slope = sxy / sxx;
  out.fitted_exponent = -slope;
  if (!(slope < -1.0))
    throw ConvergenceError("damped_time_integral: fitted decay exponent " + std::to_string(-slope) +
                           " does not exceed 1 (non-integrable tail)");
  // the caller's exponent is trusted only when the data decay at least that fast
  const double kappa = std::min(k_decay, -slope);
  double c = 0.0;
  for (int i = start; i < n; ++i) c = std::max(c, fs[i] * std::pow(1.0 + ss[i], kappa));
  out.tail_bound = c * std::pow(1.0 + horizon, 1.0 - kappa) / (kappa - 1.0);
  if (opt.two_sided) out.tail_bound *= 2.0;
  return out;
}

}  // namespace photoion::quad
