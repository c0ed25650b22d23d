// dyson.cpp — commutator expansion, Phi_T vectors, Duhamel identity, comparisons
#include "photoion/dyson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "photoion/quad.hpp"

namespace photoion::dyson {

namespace {

// sum_m f(m) G_m^dagger on the electron factor
SpMat pair_with_G(const model::DiscretizedModel& model, const Vec& f) {
  const int E = model.electron_dim();
  SpMat acc(E, E);
  for (int m = 0; m < model.mode_count(); ++m) {
    if (f[m] == cd(0.0)) continue;
    acc += f[m] * SpMat(model.coupling[m].adjoint());
  }
  acc.makeCompressed();
  return acc;
}

Vec phase_diag(const SpMat& H0, double s, double E0) {
  const Vec d = H0.diagonal();
  Vec out(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) out[i] = std::exp(kI * s * (d[i].real() - E0));
  return out;
}

void check_cloud(const dynamics::System& sys, const fock::PhotonCloud& cloud) {
  if (cloud.mode_count() != sys.basis.mode_count()) throw ConfigError("cloud: mode count differs from model");
  if (cloud.total() > sys.basis.max_total()) throw ConfigError("cloud: N exceeds N_max");
}

}  // namespace

std::string to_string(Reference r) { return r == Reference::interacting ? "interacting" : "bare"; }
std::string to_string(PhiRegime r) { return r == PhiRegime::short_time ? "short" : "long"; }

SpMat cloud_tensor(const dynamics::System& sys, const fock::PhotonCloud& cloud, double s) {
  check_cloud(sys, cloud);
  const fock::PhotonCloud cs = cloud.phased(sys.omegas, s);
  return fock::tensor(fock::identity(sys.model.electron_dim()), fock::cloud_product(sys.basis, cs));
}

SpMat commutator_W_cloud(const dynamics::System& sys, const fock::PhotonCloud& cloud, double s) {
  check_cloud(sys, cloud);
  if (cloud.total() > sys.basis.max_total() - 1)
    throw ConfigError("commutator_W_cloud: need N <= N_max - 1");
  const fock::PhotonCloud cs = cloud.phased(sys.omegas, s);
  const auto n = static_cast<Eigen::Index>(sys.dim());
  SpMat acc(n, n);
  for (std::size_t j = 0; j < cs.orbitals.size(); ++j) {
    const SpMat el = pair_with_G(sys.model, cs.orbitals[j]);
    const SpMat ph = fock::cloud_product(sys.basis, cs, static_cast<int>(j));
    acc += static_cast<double>(cs.multiplicity[j]) * fock::tensor(el, ph);
  }
  acc.makeCompressed();
  return acc;
}

SpMat brute_commutator(const dynamics::System& sys, const fock::PhotonCloud& cloud, double s) {
  const SpMat A = cloud_tensor(sys, cloud, s);
  SpMat c = SpMat(sys.W * A) - SpMat(A * sys.W);
  c.prune(cd(0.0));
  c.makeCompressed();
  return c;
}

double recurrence_horizon(const RVec& omegas) {
  std::vector<double> w(omegas.data(), omegas.data() + omegas.size());
  std::sort(w.begin(), w.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < w.size(); ++i) {
    const double d = w[i] - w[i - 1];
    if (d > 1e-12 * std::max(1.0, w[i])) gap = std::min(gap, d);
  }
  if (!std::isfinite(gap)) return std::numeric_limits<double>::infinity();
  return 0.5 * 2.0 * kPi / gap;
}

double default_horizon(double g, int K, const RVec& omegas) {
  const double cap = recurrence_horizon(omegas);
  if (g <= 0.0) return std::isfinite(cap) ? cap : 1.0;
  const double mu = 1.0 - 1.0 / K;
  return std::min(std::pow(g, mu - 1.0), cap);
}

PhiVector phi_vector(const dynamics::System& sys, const fock::PhotonCloud& cloud, const Vec& ref,
                     Reference reference, PhiRegime regime, double E0, double horizon, double tol,
                     double k_decay) {
  check_cloud(sys, cloud);
  if (ref.size() != static_cast<Eigen::Index>(sys.dim())) throw ConfigError("phi_vector: reference dimension");
  if (!(horizon > 0.0)) throw ConfigError("phi_vector: horizon must be positive");
  const double cap = recurrence_horizon(sys.omegas);
  if (horizon > cap * (1.0 + 1e-12))
    throw ConfigError("phi_vector: horizon exceeds half the discrete recurrence time");
  const Vec X = fock::apply_electron(dynamics::bound_projector(sys.model), ref, sys.photon_dim());
  const Vec d = sys.H0.diagonal();
  // the expansion rather than W A_s - A_s W: on the top sector the truncated matrix
  // commutator keeps a non-decaying remainder that the untruncated one does not have
  auto F = [&](double s) -> Vec {
    Vec c = commutator_W_cloud(sys, cloud, s) * X;
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::exp(kI * s * (d[i].real() - E0));
    return c;
  };
  quad::DampedOptions dopt;
  dopt.two_sided = regime == PhiRegime::long_time;
  const quad::DampedResult r = quad::damped_time_integral(F, k_decay, horizon, tol, dopt);
  PhiVector out;
  out.value = r.value;
  out.horizon = horizon;
  out.tail_bound = r.tail_bound;
  out.fitted_exponent = r.fitted_exponent;
  out.quadrature_error = r.quadrature_error;
  out.reference = reference;
  out.regime = regime;
  return out;
}

DuhamelResult duhamel_residual(const dynamics::System& sys, const dynamics::GroundStateResult& gs,
                               const fock::PhotonCloud& cloud, double t, double tol) {
  if (!(t >= 0.0)) throw ConfigError("duhamel_residual: t must be >= 0");
  const Vec& phi = gs.phi_gs;
  const Vec Aphi = cloud_tensor(sys, cloud, 0.0) * phi;
  DuhamelResult out;
  if (t == 0.0) {
    out.residual = (Aphi - Aphi).norm();
    return out;
  }
  const double etol = 1e-2 * tol;
  const Vec lhs = dynamics::evolve(sys.H, Aphi, t, etol, gs.E0);
  const Vec At_phi = cloud_tensor(sys, cloud, t) * phi;
  if (sys.g == 0.0) {
    out.residual = (lhs - At_phi).norm();
    return out;
  }
  auto integral = [&](int n) {
    const quad::Rule rule = quad::gauss_legendre(n, 0.0, t);
    Vec acc = Vec::Zero(phi.size());
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double s = rule.x[i];
      const Vec c = brute_commutator(sys, cloud, s) * phi;
      acc += rule.w[i] * dynamics::evolve(sys.H, c, t - s, etol / t, gs.E0);
    }
    return acc;
  };
  int n = 8;
  Vec prev = integral(n);
  Vec cur;
  double err = std::numeric_limits<double>::infinity();
  while (n < 256) {
    n *= 2;
    cur = integral(n);
    err = (cur - prev).norm();
    prev = cur;
    if (err <= 1e-2 * tol) break;
  }
  if (err > 1e-2 * tol) throw ConvergenceError("duhamel_residual: time quadrature did not converge");
  out.residual = (lhs - At_phi + kI * sys.g * cur).norm();
  out.quadrature_error = err;
  out.nodes = n;
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("loglog_slope: need matching inputs");
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConfigError("loglog_slope: values must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]) - mx;
    sxy += lx * (std::log(y[i]) - my);
    sxx += lx * lx;
  }
  return sxy / sxx;
}

CompareTable theorem_compare(const model::DiscretizedModel& model, const fock::FockBasis& basis,
                             const fock::PhotonCloud& cloud, const MomentumRegion& region,
                             const std::vector<double>& g_list, const CompareOptions& opt) {
  if (!std::is_sorted(g_list.begin(), g_list.end())) throw ConfigError("theorem_compare: g list must be sorted");
  const Mat T = dynamics::momentum_projector(model, region);
  CompareTable table;
  const int K = opt.K;
  for (double g : g_list) {
    const dynamics::System sys = dynamics::assemble(model, g, basis);
    CompareRow row;
    row.g = g;
    const dynamics::GroundStateResult gs = dynamics::ground_state(sys);
    row.E0 = gs.E0;
    row.horizon = opt.horizon > 0.0 ? opt.horizon : default_horizon(g, K, sys.omegas);
    const Vec psi = dynamics::cloud_state(sys, gs, cloud, opt.tau, 1e-2 * opt.tol);
    const Vec lhs = dynamics::evolve(sys.H, psi, opt.t, 1e-2 * opt.tol, gs.E0);
    const Vec At = cloud_tensor(sys, cloud, opt.t) * gs.phi_gs;
    Vec diff = lhs - At;
    if (g > 0.0) {
      const PhiVector phi = phi_vector(sys, cloud, gs.phi_gs, Reference::interacting, opt.regime, gs.E0,
                                       row.horizon, 1e-2 * opt.tol, static_cast<double>(K));
      diff += kI * g * phase_diag(sys.H0, -opt.t, gs.E0).cwiseProduct(phi.value);
      row.formula_Q = g * g * fock::apply_electron(T, phi.value, sys.photon_dim()).squaredNorm();
    }
    row.lhs_error = diff.norm();
    if (!opt.t_grid.empty()) {
      row.charges = dynamics::charge_table(sys, psi, {opt.R}, opt.t_grid, region, opt.tol)[0];
      row.plateau = dynamics::windowed_plateau(opt.t_grid, row.charges, opt.plateau_variation);
      row.dynamic_Q = row.plateau.found ? row.plateau.value : std::numeric_limits<double>::quiet_NaN();
    }
    table.rows.push_back(std::move(row));
  }
  std::vector<double> gs_, lhs, qd, gq;
  for (const auto& r : table.rows) {
    if (r.g <= 0.0) continue;
    gs_.push_back(r.g);
    lhs.push_back(r.lhs_error);
    if (std::isfinite(r.dynamic_Q) && r.dynamic_Q != r.formula_Q) {
      gq.push_back(r.g);
      qd.push_back(std::abs(r.dynamic_Q - r.formula_Q));
    }
  }
  table.lhs_slope = gs_.size() >= 2 ? loglog_slope(gs_, lhs) : std::numeric_limits<double>::quiet_NaN();
  table.q_diff_slope = gq.size() >= 2 ? loglog_slope(gq, qd) : std::numeric_limits<double>::quiet_NaN();
  return table;
}

// ---------------------------------------------------------------------------

Vec sample_orbital(const leading::ContinuumOrbital& phi, const std::vector<model::Mode>& modes) {
  Vec v(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t m = 0; m < modes.size(); ++m) v[m] = phi.phi(modes[m].k) * std::sqrt(modes[m].weight);
  const double n = v.norm();
  if (n == 0.0) throw ConfigError("sample_orbital: orbital vanishes on the mode grid");
  return v / n;
}

CrosscheckResult closed_form_crosscheck(const leading::ContinuumCloud& cloud, const MomentumRegion& region,
                                        const model::CouplingSpec& spec, leading::Regime regime,
                                        const CrosscheckOptions& opt) {
  if (spec.dim != 1) throw ConfigError("closed_form_crosscheck: discrete mode sums are implemented for d = 1");
  if (cloud.orbitals.empty() || cloud.orbitals.size() != cloud.multiplicity.size())
    throw ConfigError("closed_form_crosscheck: malformed cloud");
  region.validate();
  const double e0 = spec.e0;
  CrosscheckResult out;
  out.continuum = leading::charge_Q(cloud, region, spec, e0, regime, opt.leading);
  double factorial = 1.0;
  for (int n : cloud.multiplicity) factorial *= std::tgamma(n + 1.0);
  double lo = cloud.orbitals[0].r_min, hi = cloud.orbitals[0].r_max;
  for (const auto& o : cloud.orbitals) lo = std::min(lo, o.r_min), hi = std::max(hi, o.r_max);

  for (int nr : opt.levels) {
    model::ModeGridParams mp;
    mp.cutoff_Lambda = hi * (1.0 + 1e-9);
    mp.k_lo = lo;
    mp.k_hi = hi;
    mp.n_radial = nr;
    const std::vector<model::Mode> modes = model::mode_grid(mp, 1);
    model::ElectronGridParams eg = opt.electron;
    if (opt.refine_electron) eg.points = opt.electron.points * std::max(1, nr / opt.levels.front());
    const model::DiscretizedModel dm = model::discretize(spec, modes, mp.cutoff_Lambda, eg);
    const double T = opt.horizon_fraction * 2.0 * kPi / ((hi - lo) / nr);
    const int P = dm.P(), b = dm.bound_index();
    const Mat Tproj = dynamics::momentum_projector(dm, region);
    // exact time integral of exp(i s D) over [0, T] or [-T, T]
    auto kernel = [&](double D) -> cd {
      const double x = T * D;
      if (regime == leading::Regime::infinity) {
        return std::abs(x) < 1e-8 ? cd(2.0 * T) : cd(2.0 * std::sin(x) / D);
      }
      if (std::abs(x) < 1e-8) return cd(T, 0.5 * T * x);
      return (std::exp(kI * x) - 1.0) / (kI * D);
    };
    double sum = 0.0;
    for (std::size_t j = 0; j < cloud.orbitals.size(); ++j) {
      const Vec f = sample_orbital(cloud.orbitals[j], dm.modes);
      Vec psi = Vec::Zero(P);
      for (int m = 0; m < dm.mode_count(); ++m) {
        const SpMat& G = dm.coupling[m];
        for (int i = 0; i < P; ++i) {
          const cd gdag = std::conj(G.coeff(b, i));  // G_m^dagger (i, b)
          if (gdag == cd(0.0)) continue;
          const double D = dm.momenta[i].squaredNorm() - e0 - dm.modes[m].omega;
          psi[i] += f[m] * gdag * kernel(D);
        }
      }
      double q = 0.0;
      for (int i = 0; i < P; ++i) q += Tproj(i, i).real() * std::norm(psi[i]);
      sum += cloud.multiplicity[j] * q;
    }
    CrosscheckLevel lv;
    lv.n_radial = nr;
    lv.horizon = T;
    lv.discrete = factorial * sum;
    lv.continuum = out.continuum;
    lv.rel_diff = out.continuum != 0.0 ? std::abs(lv.discrete - out.continuum) / std::abs(out.continuum)
                                       : std::abs(lv.discrete);
    out.levels.push_back(lv);
  }
  out.discrete = out.levels.back().discrete;
  out.rel_diff = out.levels.back().rel_diff;
  return out;
}

}  // namespace photoion::dyson
