// leading.cpp — delta-shell / principal-value pairings and leading-order charges
#include "photoion/leading.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "photoion/quad.hpp"

namespace photoion::leading {

namespace {

const quad::SphereRule& cached_rule(int order, int dim) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, quad::SphereRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(dim == 1 ? 0 : order, dim);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, quad::sphere_rule(order, dim)).first;
  return it->second;
}

void check_orbital(const ContinuumOrbital& phi) {
  if (!phi.phi) throw ConfigError("orbital: empty function");
  if (!(phi.r_min > 0.0)) throw ConfigError("orbital: support must stay away from k = 0");
  if (!(phi.r_max > phi.r_min)) throw ConfigError("orbital: need r_max > r_min");
}

}  // namespace

std::string to_string(Regime r) { return r == Regime::zero ? "zero" : "infinity"; }

std::string to_string(MonoCase c) {
  switch (c) {
    case MonoCase::below: return "below";
    case MonoCase::edge: return "edge";
    default: return "above";
  }
}

cd shell_function(const Vec3& p, double r, const ContinuumOrbital& phi, const model::CouplingSpec& spec,
                  const LeadingOptions& opt) {
  const quad::SphereRule& rule = cached_rule(opt.sphere_order, spec.dim);
  cd acc = 0.0;
  for (std::size_t i = 0; i < rule.weights.size(); ++i) {
    const Vec3 k = r * rule.directions[i];
    acc += rule.weights[i] * spec.rho_hat(p, k) * phi.phi(k);
  }
  return acc;
}

PairingResult pair_L(const Vec3& p, const ContinuumOrbital& phi, const model::CouplingSpec& spec, double E0,
                     Regime regime, const LeadingOptions& opt) {
  check_orbital(phi);
  const int d = spec.dim;
  PairingResult res;
  res.p = p;
  res.regime = regime;
  const double rs = p.squaredNorm() - E0;
  cd shell = 0.0;
  if (rs > 0.0 && rs >= phi.r_min && rs <= phi.r_max)
    shell = std::pow(rs, d - 1) * shell_function(p, rs, phi, spec, opt);
  if (regime == Regime::infinity) {
    res.shell_part = 2.0 * kPi * shell;
    res.pv_part = 0.0;
    res.value = res.shell_part;
    return res;
  }
  res.shell_part = -kPi * shell;
  const double width = phi.r_max - phi.r_min;
  const double lo = std::max(0.5 * phi.r_min, phi.r_min - opt.pv_extension * width);
  const double hi = phi.r_max + opt.pv_extension * width;
  auto f = [&](double r) -> cd {
    if (r < phi.r_min || r > phi.r_max) return 0.0;
    return std::pow(r, d - 1) * shell_function(p, r, phi, spec, opt);
  };
  if (rs > lo && rs < hi) {
    quad::PVProblem pv{f, lo, hi, rs, 0};
    // -i PV int f/(rs - r) = i PV int f/(r - rs)
    res.pv_part = kI * quad::pv_integral(pv, opt.tol);
  } else {
    auto g = [&](double r) -> cd { return f(r) / (rs - r); };
    res.pv_part = -kI * quad::adaptive(g, lo, hi, opt.tol).value;
  }
  res.value = res.shell_part + res.pv_part;
  return res;
}

Mat cloud_gram(const ContinuumCloud& cloud, int dim, const LeadingOptions& opt) {
  const int n = static_cast<int>(cloud.orbitals.size());
  if (n == 0) throw ConfigError("cloud: no orbitals");
  double lo = cloud.orbitals[0].r_min, hi = cloud.orbitals[0].r_max;
  for (const auto& o : cloud.orbitals) {
    check_orbital(o);
    lo = std::min(lo, o.r_min);
    hi = std::max(hi, o.r_max);
  }
  const quad::SphereRule& rule = cached_rule(std::max(opt.sphere_order, 8), dim);
  auto integrand = [&](double r) -> Vec {
    Vec acc = Vec::Zero(n * n);
    for (std::size_t s = 0; s < rule.weights.size(); ++s) {
      const Vec3 k = r * rule.directions[s];
      Vec vals(n);
      for (int i = 0; i < n; ++i) vals[i] = cloud.orbitals[i].phi(k);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) acc[i * n + j] += rule.weights[s] * std::conj(vals[i]) * vals[j];
    }
    return acc * std::pow(r, dim - 1);
  };
  const Vec g = quad::adaptive(integrand, lo, hi, 1e-13).value;
  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = g[i * n + j];
  return out;
}

double orbital_charge(const ContinuumOrbital& phi, const MomentumRegion& region, const model::CouplingSpec& spec,
                      double E0, Regime regime, const LeadingOptions& opt) {
  check_orbital(phi);
  region.validate();
  const int d = spec.dim;
  const quad::SphereRule& rule = cached_rule(opt.p_sphere_order, d);
  auto radial = [&](double rho) -> double {
    double acc = 0.0;
    for (std::size_t s = 0; s < rule.weights.size(); ++s) {
      const Vec3 p = rho * rule.directions[s];
      if (!region.contains(p, d)) continue;
      acc += rule.weights[s] * std::norm(pair_L(p, phi, spec, E0, regime, opt).value);
    }
    return acc * std::pow(rho, d - 1);
  };
  double a = region.radial_min(), b = region.radial_max();
  if (regime == Regime::infinity) {
    // the integrand lives on the annulus p^2 in E0 + [r_min, r_max]
    if (E0 + phi.r_max <= 0.0) return 0.0;
    a = std::max(a, std::sqrt(std::max(0.0, E0 + phi.r_min)));
    b = std::min(b, std::sqrt(E0 + phi.r_max));
    if (!(a < b)) return 0.0;
    return quad::adaptive(radial, a, b, opt.tol).value;
  }
  if (!(a < b)) return 0.0;
  // split at the annulus edges where the shell part switches on
  std::vector<double> cuts = {a};
  for (double r : {phi.r_min, phi.r_max}) {
    if (E0 + r > 0.0) {
      const double c = std::sqrt(E0 + r);
      if (c > a && c < b) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += quad::adaptive(radial, cuts[i], cuts[i + 1], opt.tol).value;
  const double last = cuts.back();
  if (std::isfinite(b)) {
    total += quad::adaptive(radial, last, b, opt.tol).value;
  } else {
    const double mid = std::max(last, 1.0) * 4.0;
    total += quad::adaptive(radial, last, mid, opt.tol).value;
    total += quad::adaptive_to_infinity(radial, mid, opt.tol).value;
  }
  return total;
}

double charge_Q(const ContinuumCloud& cloud, const MomentumRegion& region, const model::CouplingSpec& spec,
                double E0, Regime regime, const LeadingOptions& opt) {
  if (cloud.orbitals.size() != cloud.multiplicity.size())
    throw ConfigError("charge_Q: orbital/multiplicity mismatch");
  const Mat gram = cloud_gram(cloud, spec.dim, opt);
  if ((gram - Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > 1e-8)
    throw ConfigError("charge_Q: cloud orbitals are not orthonormal");
  double factorial = 1.0;
  for (int n : cloud.multiplicity) {
    if (n < 1) throw ConfigError("charge_Q: multiplicities must be >= 1");
    factorial *= std::tgamma(n + 1.0);
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < cloud.orbitals.size(); ++j)
    sum += cloud.multiplicity[j] * orbital_charge(cloud.orbitals[j], region, spec, E0, regime, opt);
  return factorial * sum;
}

// ---------------------------------------------------------------------------
// Monochromatic limit

std::function<double(double)> bump_profile() {
  auto raw = [](double x) {
    const double u = 1.0 - 4.0 * x * x;
    return u > 0.0 ? std::exp(-1.0 / u) : 0.0;
  };
  const double n2 = quad::adaptive([&](double x) { return raw(x) * raw(x); }, -0.5, 0.5, 1e-15).value;
  const double c = 1.0 / std::sqrt(n2);
  return [raw, c](double x) { return c * raw(x); };
}

cd plus_i0_transform(const std::function<double(double)>& chi, double y, double tol) {
  if (std::abs(y) < 0.5) {
    quad::PVProblem pv{[&](double x) -> cd { return chi(x); }, -0.5, 0.5, y, 0};
    // int chi/(y - x + i0) = -PV int chi/(x - y) - i pi chi(y)
    return -quad::pv_integral(pv, tol) - kI * kPi * chi(y);
  }
  return quad::adaptive([&](double x) { return chi(x) / (y - x); }, -0.5, 0.5, tol).value;
}

double profile_integral(const std::function<double(double)>& chi, bool half_line, double tol) {
  const double Y = 2.0;
  auto f = [&](double y) { return std::norm(plus_i0_transform(chi, y, 1e-3 * tol)); };
  double finite = 0.0;
  if (half_line) {
    finite = quad::adaptive(f, 0.0, 0.5, tol).value + quad::adaptive(f, 0.5, Y, tol).value;
  } else {
    finite = quad::adaptive(f, -Y, -0.5, tol).value + quad::adaptive(f, -0.5, 0.5, tol).value +
             quad::adaptive(f, 0.5, Y, tol).value;
  }
  // |y| > Y: F(y) = sum_n m_n y^{-n-1} with moments m_n of chi
  const int nm = 40;
  std::vector<double> m(nm);
  for (int n = 0; n < nm; ++n)
    m[n] = quad::adaptive([&](double x) { return std::pow(x, n) * chi(x); }, -0.5, 0.5, 1e-16).value;
  double tail = 0.0;
  for (int a = 0; a < nm; ++a)
    for (int b = 0; b < nm; ++b) {
      const int q = a + b + 1;
      const double base = m[a] * m[b] * std::pow(Y, -q) / q;
      tail += half_line ? base : base * (1.0 + ((a + b) % 2 == 0 ? 1.0 : -1.0));
    }
  return finite + tail;
}

cd theta_function(const Vec3& p, double r, double omega, const std::function<cd(const Vec3&)>& kappa,
                  const model::CouplingSpec& spec, const LeadingOptions& opt) {
  const int d = spec.dim;
  const quad::SphereRule& rule = cached_rule(opt.sphere_order, d);
  cd acc = 0.0;
  for (std::size_t i = 0; i < rule.weights.size(); ++i)
    acc += rule.weights[i] * spec.rho_hat(p, r * rule.directions[i]) * kappa(rule.directions[i]);
  return -kI * std::pow(r, d - 1) * std::pow(omega, -0.5 * (d - 1)) * acc;
}

namespace {
void check_profile(const std::function<double(double)>& chi, const std::function<cd(const Vec3&)>& kappa, int dim,
                   const LeadingOptions& opt) {
  const double n2 = quad::adaptive([&](double x) { return chi(x) * chi(x); }, -0.5, 0.5, 1e-14).value;
  if (std::abs(n2 - 1.0) > 1e-8) throw ConfigError("monochromatic: chi is not L2-normalized");
  const quad::SphereRule& rule = cached_rule(std::max(opt.sphere_order, 16), dim);
  double k2 = 0.0;
  for (std::size_t i = 0; i < rule.weights.size(); ++i) k2 += rule.weights[i] * std::norm(kappa(rule.directions[i]));
  if (std::abs(k2 - 1.0) > 1e-8) throw ConfigError("monochromatic: kappa is not normalized on the sphere");
}
}  // namespace

MonochromaticResult monochromatic(double omega, const std::function<double(double)>& chi,
                                  const std::function<cd(const Vec3&)>& kappa, const MomentumRegion& region,
                                  const model::CouplingSpec& spec, double E0, const LeadingOptions& opt) {
  if (!(omega > 0.0)) throw ConfigError("monochromatic: omega must be positive");
  check_profile(chi, kappa, spec.dim, opt);
  region.validate();
  MonochromaticResult res;
  res.omega = omega;
  const double c = E0 + omega;
  const int d = spec.dim;
  if (std::abs(c) < 1e-9) {
    res.mono_case = MonoCase::edge;
    res.I_value = profile_integral(chi, true);
    if (d == 3) {
      res.theta0 = 0.0;  // carries the factor sqrt(E0 + omega)
      res.limit_charge = 0.0;
    } else {
      // in d = 1 the Jacobian 1/(2 p*) diverges at the edge
      res.theta0 = std::numeric_limits<double>::infinity();
      res.limit_charge = std::numeric_limits<double>::infinity();
    }
    return res;
  }
  if (c < 0.0) {
    res.mono_case = MonoCase::below;
    return res;
  }
  res.mono_case = MonoCase::above;
  const double ps = std::sqrt(c);
  const quad::SphereRule& rule = cached_rule(opt.p_sphere_order, d);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.weights.size(); ++i) {
    const Vec3 p = ps * rule.directions[i];
    if (!region.contains(p, d)) continue;
    acc += rule.weights[i] * std::norm(theta_function(p, omega, omega, kappa, spec, opt));
  }
  // dp^2 = 2 p dp: the radial Jacobian contributes p*^{d-2} / 2
  res.theta0 = 0.5 * std::pow(ps, d - 2) * acc;
  res.I_value = profile_integral(chi, false);
  res.limit_charge = res.theta0 * res.I_value;
  return res;
}

ContinuumOrbital monochromatic_orbital(double omega, double delta, const std::function<double(double)>& chi,
                                       const std::function<cd(const Vec3&)>& kappa, int dim,
                                       const LeadingOptions& opt) {
  if (!(delta > 0.0) || !(omega - 0.5 * delta > 0.0))
    throw ConfigError("monochromatic_orbital: need 0 < delta < 2 omega");
  check_profile(chi, kappa, dim, opt);
  const double n2 = quad::adaptive(
      [&](double x) { return std::pow(omega + delta * x, dim - 1) * chi(x) * chi(x); }, -0.5, 0.5, 1e-15).value;
  const double norm = 1.0 / std::sqrt(n2 * delta);
  ContinuumOrbital o;
  o.r_min = omega - 0.5 * delta;
  o.r_max = omega + 0.5 * delta;
  o.phi = [=](const Vec3& k) -> cd {
    const double r = k.norm();
    return norm * chi((r - omega) / delta) * kappa(k / r);
  };
  return o;
}

std::vector<DeltaSweepRow> monochromatic_sweep(double omega, const std::vector<double>& deltas,
                                               const std::function<double(double)>& chi,
                                               const std::function<cd(const Vec3&)>& kappa,
                                               const MomentumRegion& region, const model::CouplingSpec& spec,
                                               double E0, const LeadingOptions& opt) {
  std::vector<DeltaSweepRow> rows;
  for (double delta : deltas) {
    const ContinuumOrbital o = monochromatic_orbital(omega, delta, chi, kappa, spec.dim, opt);
    rows.push_back({delta, orbital_charge(o, region, spec, E0, Regime::zero, opt)});
  }
  return rows;
}

}  // namespace photoion::leading
