// model.cpp — presets, Hypothesis-1 integral, discretization, model serialization
#include "photoion/model.hpp"

#include <cmath>
#include <set>

#include "photoion/quad.hpp"

namespace photoion::model {

namespace {

double get_param(const std::map<std::string, double>& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

void check_keys(const std::map<std::string, double>& p, const std::set<std::string>& allowed,
                const std::string& name) {
  for (const auto& [k, v] : p) {
    if (!allowed.count(k)) throw ConfigError("preset " + name + ": unknown parameter '" + k + "'");
    if (!std::isfinite(v)) throw ConfigError("preset " + name + ": parameter '" + k + "' not finite");
  }
}

int dim_param(const std::map<std::string, double>& p) {
  const double d = get_param(p, "dim", 1.0);
  if (d != 1.0 && d != 3.0) throw ConfigError("preset: dim must be 1 or 3");
  return static_cast<int>(d);
}

}  // namespace

void CouplingSpec::validate() const {
  if (!rho_hat || !eta_hat) throw ConfigError("CouplingSpec: rho_hat and eta_hat are required");
  if (!(e0 < 0.0)) throw ConfigError("CouplingSpec: e0 must be negative");
  if (smoothness_K <= 1) throw ConfigError("CouplingSpec: smoothness_K must exceed 1");
  if (!(decay_gamma > 1.5)) throw ConfigError("CouplingSpec: decay_gamma must exceed 3/2");
  if (dim != 1 && dim != 3) throw ConfigError("CouplingSpec: dim must be 1 or 3");
}

Vec3 dipole_polarization(const Vec3& k, int dim) {
  if (dim == 1) return Vec3(1, 0, 0);
  // Smooth except on the z axis; a global smooth tangent field does not exist.
  Vec3 e = k.cross(Vec3(0, 0, 1));
  if (e.norm() < 1e-12 * std::max(1.0, k.norm())) e = k.cross(Vec3(1, 0, 0));
  const double n = e.norm();
  if (n == 0.0) return Vec3(1, 0, 0);
  return e / n;
}

CouplingSpec preset(const std::string& name, const std::map<std::string, double>& params) {
  CouplingSpec s;
  s.preset_name = name;
  if (name == "gaussian-toy") {
    check_keys(params, {"c", "sigma_p", "sigma_k", "e0", "dim", "K", "gamma"}, name);
    const double c = get_param(params, "c", 1.0);
    const double sp = get_param(params, "sigma_p", 1.0);
    const double sk = get_param(params, "sigma_k", 1.0);
    if (!(sp > 0.0) || !(sk > 0.0)) throw ConfigError("gaussian-toy: widths must be positive");
    s.e0 = get_param(params, "e0", -1.0);
    s.dim = dim_param(params);
    s.smoothness_K = static_cast<int>(get_param(params, "K", 2.0));
    s.decay_gamma = get_param(params, "gamma", 2.0);
    s.rho_hat = [c, sp, sk](const Vec3& p, const Vec3& k) -> cd {
      return c * std::exp(-p.squaredNorm() / (2 * sp * sp) - k.squaredNorm() / (2 * sk * sk));
    };
    s.eta_hat = s.rho_hat;
    s.eta_is_rho = true;
    s.preset_params = {{"c", c}, {"sigma_p", sp}, {"sigma_k", sk}, {"e0", s.e0},
                       {"dim", double(s.dim)}, {"K", double(s.smoothness_K)}, {"gamma", s.decay_gamma}};
  } else if (name == "dipole") {
    check_keys(params, {"c", "R", "a", "sigma_k", "e0", "dim", "K", "gamma"}, name);
    const double c = get_param(params, "c", 1.0);
    const double R = get_param(params, "R", 10.0);
    const double a = get_param(params, "a", 1.0);
    const double sk = get_param(params, "sigma_k", 1.0);
    if (!(R > 0.0) || !(a > 0.0) || !(sk > 0.0)) throw ConfigError("dipole: widths must be positive");
    s.e0 = get_param(params, "e0", -1.0);
    s.dim = dim_param(params);
    s.smoothness_K = static_cast<int>(get_param(params, "K", 2.0));
    s.decay_gamma = get_param(params, "gamma", 2.0);
    const int d = s.dim;
    // kappa(x/R) phi_el(x) = (pi a^2)^{-d/4} exp(-x^2 / 2b^2), 1/b^2 = 1/a^2 + 1/R^2
    const double b = 1.0 / std::sqrt(1.0 / (a * a) + 1.0 / (R * R));
    const double norm_el = std::pow(kPi * a * a, -0.25 * d);
    auto kappa_k = [sk](const Vec3& k) { return std::exp(-k.squaredNorm() / (2 * sk * sk)); };
    s.rho_hat = [=](const Vec3& p, const Vec3& k) -> cd {
      const Vec3 eps = dipole_polarization(k, d);
      const double ep = eps.dot(p);
      return c * kappa_k(k) * std::sqrt(k.norm()) * norm_el * std::pow(b, d + 2) * ep *
             std::exp(-0.5 * b * b * p.squaredNorm()) * cd(0.0, -1.0);
    };
    s.eta_hat = s.rho_hat;
    s.eta_is_rho = true;
    s.m_kernel = [=](const Vec3& x, const Vec3& k) -> cd {
      const Vec3 eps = dipole_polarization(k, d);
      return c * std::exp(-x.squaredNorm() / (2 * R * R)) * kappa_k(k) * std::sqrt(k.norm()) *
             eps.dot(x);
    };
    s.preset_params = {{"c", c}, {"R", R}, {"a", a}, {"sigma_k", sk}, {"e0", s.e0},
                       {"dim", double(s.dim)}, {"K", double(s.smoothness_K)}, {"gamma", s.decay_gamma}};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Electron Fourier pair

ElectronFourier::ElectronFourier(int n, double h_x, int dim) : n_(n), dim_(dim) {
  if (n < 2 || n % 2) throw ConfigError("electron grid: points per axis must be even and >= 2");
  if (!(h_x > 0.0)) throw ConfigError("electron grid: h_x must be positive");
  const double h_p = 2.0 * kPi / (n * h_x);
  u1_.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double p = (i - n / 2) * h_p, x = (j - n / 2) * h_x;
      u1_(i, j) = std::polar(1.0 / std::sqrt(double(n)), -p * x);
    }
}

Vec ElectronFourier::apply(const Vec& in, bool forward) const {
  const Mat u = forward ? u1_ : Mat(u1_.adjoint());
  if (dim_ == 1) return u * in;
  const int n = n_;
  Vec cur = in, next(in.size());
  // separable passes, x-fastest storage
  for (int axis = 0; axis < 3; ++axis) {
    const int stride = axis == 0 ? 1 : (axis == 1 ? n : n * n);
    for (int base = 0; base < n * n * n; ++base) {
      const int coord = (base / stride) % n;
      if (coord != 0) continue;
      for (int i = 0; i < n; ++i) {
        cd acc = 0.0;
        for (int j = 0; j < n; ++j) acc += u(i, j) * cur[base + j * stride];
        next[base + i * stride] = acc;
      }
    }
    std::swap(cur, next);
  }
  return cur;
}

Vec ElectronFourier::to_momentum(const Vec& position) const { return apply(position, true); }
Vec ElectronFourier::to_position(const Vec& momentum) const { return apply(momentum, false); }

Mat ElectronFourier::matrix() const {
  if (dim_ == 1) return u1_;
  const int P = n_ * n_ * n_;
  Mat m(P, P);
  for (int j = 0; j < P; ++j) {
    Vec e = Vec::Zero(P);
    e[j] = 1.0;
    m.col(j) = to_momentum(e);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Hypothesis 1

namespace {

struct Stencil {
  std::vector<int> offsets;
  std::vector<double> coeffs;  // multiply by h^-order
};

Stencil central_stencil(int order) {
  switch (order) {
    case 0: return {{0}, {1.0}};
    case 1: return {{-2, -1, 1, 2}, {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12}};
    case 2: return {{-2, -1, 0, 1, 2}, {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12}};
    case 3: return {{-3, -2, -1, 1, 2, 3}, {1.0 / 8, -1.0, 13.0 / 8, -13.0 / 8, 1.0, -1.0 / 8}};
    case 4: return {{-3, -2, -1, 0, 1, 2, 3},
                    {-1.0 / 6, 2.0, -13.0 / 2, 28.0 / 3, -13.0 / 2, 2.0, -1.0 / 6}};
    default: throw ConfigError("hypothesis_check: derivative order above 4 is not supported");
  }
}

// Largest singular value of [[diag(D), u], [w^*, 0]].
double block_norm(const Vec& D, const Vec& u, const Vec& w) {
  const double nu = u.norm(), nw = w.norm();
  if (D.cwiseAbs().maxCoeff() == 0.0) return std::max(nu, nw);
  const int n = static_cast<int>(D.size()) + 1;
  auto apply_g = [&](const Vec& x) {
    Vec y(n);
    y.head(n - 1) = D.cwiseProduct(x.head(n - 1)) + u * x[n - 1];
    y[n - 1] = w.dot(x.head(n - 1));
    return y;
  };
  auto apply_gh = [&](const Vec& y) {
    Vec x(n);
    x.head(n - 1) = D.conjugate().cwiseProduct(y.head(n - 1)) + w * y[n - 1];
    x[n - 1] = u.dot(y.head(n - 1));
    return x;
  };
  // Lanczos on G^* G with full reorthogonalization
  const int m = std::min(n, 60);
  std::vector<Vec> V;
  Vec v = Vec::Ones(n) / std::sqrt(double(n));
  std::vector<double> alpha, beta;
  for (int j = 0; j < m; ++j) {
    V.push_back(v);
    Vec r = apply_gh(apply_g(v));
    const double a = v.dot(r).real();
    alpha.push_back(a);
    for (const auto& q : V) r -= q * q.dot(r);
    for (const auto& q : V) r -= q * q.dot(r);
    const double b = r.norm();
    if (b < 1e-14 * std::max(1.0, std::abs(a))) break;
    beta.push_back(b);
    v = r / b;
  }
  const int k = static_cast<int>(alpha.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

void require_finite(cd v) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw ConfigError("hypothesis_check: kernel evaluation produced a non-finite value");
}

struct SamplingGrid {
  int n, dim, P;
  double h_p, h_x;
  std::vector<Vec3> p, x;
};

SamplingGrid sampling_grid(int n, double h_p, int dim) {
  SamplingGrid g;
  g.n = n;
  g.dim = dim;
  g.h_p = h_p;
  g.h_x = 2.0 * kPi / (n * h_p);
  g.P = dim == 1 ? n : n * n * n;
  for (int idx = 0; idx < g.P; ++idx) {
    const int ix = idx % n, iy = dim == 3 ? (idx / n) % n : 0, iz = dim == 3 ? idx / (n * n) : 0;
    Vec3 c(ix - n / 2, dim == 3 ? iy - n / 2 : 0, dim == 3 ? iz - n / 2 : 0);
    g.p.push_back(c * h_p);
    g.x.push_back(c * g.h_x);
  }
  return g;
}

}  // namespace

double hypothesis_J(const CouplingSpec& spec, const HypothesisBudget& budget, const Vec3& k) {
  const int d = spec.dim;
  const SamplingGrid grid = sampling_grid(budget.electron_points, budget.h_p, d);
  const ElectronFourier fourier(budget.electron_points, grid.h_x, d);
  const double h = budget.fd_step > 0.0 ? budget.fd_step : 1e-3 * budget.k_max;
  const int K = spec.smoothness_K;
  const double sqrt_cell = std::sqrt(std::pow(grid.h_p, d));

  // Derivative of the sampled kernels along multi-index alpha.
  auto derivative = [&](const std::array<int, 3>& alpha, Vec& rho, Vec& eta, Vec& mvals) {
    rho = Vec::Zero(grid.P);
    eta = Vec::Zero(grid.P);
    mvals = Vec::Zero(grid.P);
    const Stencil sx = central_stencil(alpha[0]), sy = central_stencil(alpha[1]),
                  sz = central_stencil(alpha[2]);
    const int order = alpha[0] + alpha[1] + alpha[2];
    const double scale = std::pow(h, -order);
    for (std::size_t a = 0; a < sx.offsets.size(); ++a)
      for (std::size_t b = 0; b < sy.offsets.size(); ++b)
        for (std::size_t c = 0; c < sz.offsets.size(); ++c) {
          const double coef = sx.coeffs[a] * sy.coeffs[b] * sz.coeffs[c] * scale;
          const Vec3 kk = k + h * Vec3(sx.offsets[a], sy.offsets[b], sz.offsets[c]);
          for (int i = 0; i < grid.P; ++i) {
            const cd r = spec.rho_hat(grid.p[i], kk);
            const cd e = spec.eta_is_rho ? r : spec.eta_hat(grid.p[i], kk);
            require_finite(r);
            require_finite(e);
            rho[i] += coef * r;
            eta[i] += coef * e;
            if (spec.m_kernel) {
              const cd mv = (*spec.m_kernel)(grid.x[i], kk);
              require_finite(mv);
              mvals[i] += coef * mv;
            }
          }
        }
    rho *= sqrt_cell;
    eta *= sqrt_cell;
  };

  std::vector<std::array<int, 3>> alphas;
  for (int a = 0; a <= K; ++a)
    for (int b = 0; b <= (d == 3 ? K - a : 0); ++b)
      for (int c = 0; c <= (d == 3 ? K - a - b : 0); ++c) alphas.push_back({a, b, c});

  double max_deriv = 0.0;
  Vec rho0, eta0, m0;
  for (const auto& alpha : alphas) {
    Vec rho, eta, mv;
    derivative(alpha, rho, eta, mv);
    if (alpha == std::array<int, 3>{0, 0, 0}) {
      rho0 = rho;
      eta0 = eta;
      m0 = mv;
    }
    if (spec.m_kernel) {
      max_deriv = std::max(max_deriv, block_norm(mv, fourier.to_position(eta), fourier.to_position(rho)));
    } else {
      max_deriv = std::max(max_deriv, std::max(eta.norm(), rho.norm()));
    }
  }
  // weighted terms need position space
  const Vec eta_x = fourier.to_position(eta0), rho_x = fourier.to_position(rho0);
  Vec wgt(grid.P);
  for (int i = 0; i < grid.P; ++i) wgt[i] = std::pow(grid.x[i].norm(), spec.decay_gamma);
  const Vec d_left = wgt.cwiseProduct(m0);
  const double left = block_norm(d_left, wgt.cwiseProduct(eta_x), rho_x);
  const double right = block_norm(d_left, eta_x, wgt.cwiseProduct(rho_x));
  return max_deriv + left + right;
}

HypothesisReport hypothesis_check(const CouplingSpec& spec, const HypothesisBudget& budget) {
  spec.validate();
  if (budget.n_radial < 2 || !(budget.k_max > 0.0))
    throw ConfigError("hypothesis_check: invalid radial budget");
  const int d = spec.dim;

  auto integrand = [&](const Vec3& k) {
    const double w = k.norm();
    const double J = hypothesis_J(spec, budget, k);
    const double v = (1.0 + 1.0 / w) * J * J;
    if (!std::isfinite(v)) throw ConfigError("hypothesis_check: non-finite integrand");
    return v;
  };

  // Integrability probe at small |k|: need |k| * (1 + 1/|k|) J^2 |k|^{d-1} -> 0.
  {
    const Vec3 dir(1, 0, 0);
    const double ra = 1e-2 * budget.k_max, rb = 1e-4 * budget.k_max;
    const double qa = ra * integrand(ra * dir) * std::pow(ra, d - 1);
    const double qb = rb * integrand(rb * dir) * std::pow(rb, d - 1);
    if (qa > 0.0 && qb > 0.5 * qa)
      throw ConfigError("hypothesis_check: integrand not integrable at k = 0 (dispersion singularity)");
  }

  auto integrate = [&](int n_radial, int sphere_order) {
    const quad::Rule radial = quad::gauss_legendre(n_radial, 0.0, budget.k_max);
    const quad::SphereRule sph = quad::sphere_rule(sphere_order, d);
    double acc = 0.0;
    for (int i = 0; i < n_radial; ++i) {
      const double r = radial.x[i];
      const double rw = radial.w[i] * std::pow(r, d - 1);
      for (std::size_t s = 0; s < sph.weights.size(); ++s)
        acc += rw * sph.weights[s] * integrand(r * sph.directions[s]);
    }
    return acc;
  };

  HypothesisReport rep;
  rep.integral_value = integrate(budget.n_radial, budget.sphere_order);
  const double coarse = integrate(std::max(2, budget.n_radial / 2), std::max(1, budget.sphere_order / 2));
  rep.quadrature_error = std::abs(rep.integral_value - coarse);
  rep.passes = rep.integral_value <= 1.0 + rep.quadrature_error;
  return rep;
}

// ---------------------------------------------------------------------------
// Discretization

RVec DiscretizedModel::omegas() const {
  RVec w(modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) w[m] = modes[m].omega;
  return w;
}

RVec DiscretizedModel::electron_energies() const {
  RVec e(electron_dim());
  for (int i = 0; i < P(); ++i) e[i] = momenta[i].squaredNorm();
  e[P()] = e0;
  return e;
}

void DiscretizedModel::check_invariants() const {
  double wsum = 0.0;
  for (const auto& m : modes) {
    if (!(m.omega > 0.0) || !(m.weight > 0.0))
      throw ValidationError("model: mode energies and weights must be positive");
    if (!(m.omega < cutoff_Lambda)) throw ValidationError("model: mode beyond the cutoff");
    wsum += m.weight;
  }
  if (cell_volume > 0.0 && std::abs(wsum - cell_volume) > 0.01 * cell_volume)
    throw ValidationError("model: mode weights do not match the cell volume within 1%");
  const int b = bound_index();
  for (const auto& g : coupling) {
    if (g.rows() != electron_dim() || g.cols() != electron_dim())
      throw ValidationError("model: coupling matrix has wrong size");
    if (g.coeff(b, b) != cd(0.0, 0.0)) throw ValidationError("model: nonzero bound-bound coupling");
  }
}

std::vector<Mode> mode_grid(const ModeGridParams& p, int dim) {
  if (!(p.cutoff_Lambda > 0.0)) throw ConfigError("mode grid: cutoff_Lambda must be positive");
  const double lo = p.k_lo < 0.0 ? 0.05 * p.cutoff_Lambda : p.k_lo;
  const double hi = p.k_hi < 0.0 ? p.cutoff_Lambda : p.k_hi;
  if (lo == 0.0) throw ConfigError("mode grid: radial range must exclude k = 0");
  if (!(lo < hi)) throw ConfigError("mode grid: need k_lo < k_hi");
  if (hi > p.cutoff_Lambda) throw ConfigError("mode grid: k_hi exceeds cutoff_Lambda");
  if (p.n_radial < 1) throw ConfigError("mode grid: n_radial must be >= 1");
  const double dr = (hi - lo) / p.n_radial;
  std::vector<Mode> out;
  if (dim == 1) {
    for (int i = 0; i < p.n_radial; ++i) {
      const double r = lo + (i + 0.5) * dr;
      for (int s : {1, -1}) out.push_back({Vec3(s * r, 0, 0), r, dr});
    }
    return out;
  }
  if (dim != 3) throw ConfigError("mode grid: dim must be 1 or 3");
  if (p.n_theta < 1 || p.n_phi < 1) throw ConfigError("mode grid: angular counts must be >= 1");
  const double dc = 2.0 / p.n_theta, dphi = 2.0 * kPi / p.n_phi;
  for (int i = 0; i < p.n_radial; ++i) {
    const double r0 = lo + i * dr, r1 = r0 + dr, r = r0 + 0.5 * dr;
    const double shell = (r1 * r1 * r1 - r0 * r0 * r0) / 3.0;
    for (int t = 0; t < p.n_theta; ++t) {
      const double ct = -1.0 + (t + 0.5) * dc, st = std::sqrt(1.0 - ct * ct);
      for (int f = 0; f < p.n_phi; ++f) {
        const double ph = (f + 0.5) * dphi;
        out.push_back({r * Vec3(st * std::cos(ph), st * std::sin(ph), ct), r, shell * dc * dphi});
      }
    }
  }
  return out;
}

DiscretizedModel discretize(const CouplingSpec& spec, const GridParams& grid) {
  DiscretizedModel m = discretize(spec, mode_grid(grid.modes, spec.dim), grid.modes.cutoff_Lambda,
                                  grid.electron);
  const double lo = grid.modes.k_lo < 0.0 ? 0.05 * grid.modes.cutoff_Lambda : grid.modes.k_lo;
  const double hi = grid.modes.k_hi < 0.0 ? grid.modes.cutoff_Lambda : grid.modes.k_hi;
  m.cell_volume = spec.dim == 1 ? 2.0 * (hi - lo) : 4.0 * kPi * (hi * hi * hi - lo * lo * lo) / 3.0;
  m.check_invariants();
  return m;
}

DiscretizedModel discretize(const CouplingSpec& spec, const std::vector<Mode>& modes,
                            double cutoff_Lambda, const ElectronGridParams& electron) {
  spec.validate();
  DiscretizedModel m;
  m.dim = spec.dim;
  m.cutoff_Lambda = cutoff_Lambda;
  m.e0 = spec.e0;
  m.points_per_axis = electron.points;
  m.h_x = electron.h_x;
  const ElectronFourier fourier(electron.points, electron.h_x, spec.dim);
  const int n = electron.points;
  m.h_p = 2.0 * kPi / (n * electron.h_x);
  const int P = spec.dim == 1 ? n : n * n * n;
  for (int idx = 0; idx < P; ++idx) {
    const int ix = idx % n, iy = spec.dim == 3 ? (idx / n) % n : 0, iz = spec.dim == 3 ? idx / (n * n) : 0;
    Vec3 c(ix - n / 2, spec.dim == 3 ? iy - n / 2 : 0, spec.dim == 3 ? iz - n / 2 : 0);
    m.positions.push_back(c * m.h_x);
    m.momenta.push_back(c * m.h_p);
  }
  for (const auto& md : modes) {
    if (md.k.norm() == 0.0) throw ConfigError("discretize: mode at k = 0");
    if (!(md.k.norm() < cutoff_Lambda)) throw ConfigError("discretize: mode with |k| >= Lambda");
    if (!(md.weight > 0.0)) throw ConfigError("discretize: non-positive mode weight");
    if (std::abs(md.omega - md.k.norm()) > 1e-12 * md.omega)
      throw ConfigError("discretize: omega must equal |k|");
  }
  m.modes = modes;
  const double cell = std::pow(m.h_p, spec.dim);
  const int b = P;
  for (const auto& md : modes) {
    const double s = std::sqrt(md.weight * cell);
    std::vector<Eigen::Triplet<cd>> trip;
    trip.reserve(2 * P);
    for (int i = 0; i < P; ++i) {
      const cd r = spec.rho_hat(m.momenta[i], md.k);
      const cd e = spec.eta_is_rho ? r : spec.eta_hat(m.momenta[i], md.k);
      if (e != cd(0.0)) trip.emplace_back(i, b, e * s);
      if (r != cd(0.0)) trip.emplace_back(b, i, std::conj(r) * s);
    }
    if (spec.m_kernel) {
      Vec diag(P);
      for (int j = 0; j < P; ++j) diag[j] = (*spec.m_kernel)(m.positions[j], md.k) * std::sqrt(md.weight);
      for (int j = 0; j < P; ++j) {
        Vec ej = Vec::Zero(P);
        ej[j] = 1.0;
        const Vec col = fourier.to_momentum(diag.cwiseProduct(fourier.to_position(ej)));
        for (int i = 0; i < P; ++i)
          if (col[i] != cd(0.0)) trip.emplace_back(i, j, col[i]);
      }
    }
    SpMat g(P + 1, P + 1);
    g.setFromTriplets(trip.begin(), trip.end());
    g.makeCompressed();
    m.coupling.push_back(std::move(g));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {
nlohmann::json vec3_json(const Vec3& v) { return nlohmann::json::array({v[0], v[1], v[2]}); }
Vec3 vec3_from(const nlohmann::json& j) { return Vec3(j.at(0), j.at(1), j.at(2)); }
}  // namespace

nlohmann::json to_json(const DiscretizedModel& m) {
  nlohmann::json j;
  j["schema"] = "photoion-model-v1";
  j["dim"] = m.dim;
  j["points_per_axis"] = m.points_per_axis;
  j["h_x"] = m.h_x;
  j["cutoff_Lambda"] = m.cutoff_Lambda;
  j["e0"] = m.e0;
  j["cell_volume"] = m.cell_volume;
  auto& modes = j["modes"] = nlohmann::json::array();
  for (const auto& md : m.modes)
    modes.push_back({{"k", vec3_json(md.k)}, {"omega", md.omega}, {"weight", md.weight}});
  auto& cpl = j["coupling"] = nlohmann::json::array();
  for (const auto& g : m.coupling) {
    nlohmann::json t = nlohmann::json::array();
    for (int r = 0; r < g.outerSize(); ++r)
      for (SpMat::InnerIterator it(g, r); it; ++it)
        t.push_back({it.row(), it.col(), it.value().real(), it.value().imag()});
    cpl.push_back(std::move(t));
  }
  return j;
}

DiscretizedModel model_from_json(const nlohmann::json& j) {
  if (j.value("schema", std::string()) != "photoion-model-v1")
    throw ConfigError("model json: schema must be photoion-model-v1");
  DiscretizedModel m;
  m.dim = j.at("dim");
  m.points_per_axis = j.at("points_per_axis");
  m.h_x = j.at("h_x");
  m.cutoff_Lambda = j.at("cutoff_Lambda");
  m.e0 = j.at("e0");
  m.cell_volume = j.value("cell_volume", 0.0);
  const int n = m.points_per_axis;
  m.h_p = 2.0 * kPi / (n * m.h_x);
  const int P = m.dim == 1 ? n : n * n * n;
  for (int idx = 0; idx < P; ++idx) {
    const int ix = idx % n, iy = m.dim == 3 ? (idx / n) % n : 0, iz = m.dim == 3 ? idx / (n * n) : 0;
    Vec3 c(ix - n / 2, m.dim == 3 ? iy - n / 2 : 0, m.dim == 3 ? iz - n / 2 : 0);
    m.positions.push_back(c * m.h_x);
    m.momenta.push_back(c * m.h_p);
  }
  for (const auto& md : j.at("modes")) m.modes.push_back({vec3_from(md.at("k")), md.at("omega"), md.at("weight")});
  for (const auto& t : j.at("coupling")) {
    std::vector<Eigen::Triplet<cd>> trip;
    for (const auto& e : t) trip.emplace_back(e.at(0).get<int>(), e.at(1).get<int>(), cd(e.at(2), e.at(3)));
    SpMat g(P + 1, P + 1);
    g.setFromTriplets(trip.begin(), trip.end());
    g.makeCompressed();
    m.coupling.push_back(std::move(g));
  }
  if (m.coupling.size() != m.modes.size()) throw ConfigError("model json: coupling/mode count mismatch");
  m.check_invariants();
  return m;
}

}  // namespace photoion::model
