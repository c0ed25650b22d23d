// dynamics.cpp — tensor-space assembly, Lanczos ground state, Krylov propagation, charge measurements
#include "photoion/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace photoion::dynamics {

namespace {

struct Lanczos {
  std::vector<Vec> V;
  std::vector<double> alpha;
  std::vector<double> beta;   // beta[j] couples V[j] and V[j+1]; last entry is the residual norm
  bool breakdown = false;
};

template <class Op>
Lanczos lanczos(const Op& op, const Vec& v0, int m, double scale) {
  Lanczos L;
  const double n0 = v0.norm();
  Vec v = v0 / n0;
  for (int j = 0; j < m; ++j) {
    L.V.push_back(v);
    Vec r = op(v);
    const double a = v.dot(r).real();
    L.alpha.push_back(a);
    // two passes of classical Gram-Schmidt against the full basis
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : L.V) r -= q * q.dot(r);
    const double b = r.norm();
    L.beta.push_back(b);
    if (b <= 1e-13 * scale) {
      L.breakdown = true;
      break;
    }
    v = r / b;
  }
  return L;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tridiag_eig(const Lanczos& L) {
  const int k = static_cast<int>(L.alpha.size());
  Eigen::VectorXd d(k), e(std::max(0, k - 1));
  for (int i = 0; i < k; ++i) d[i] = L.alpha[i];
  for (int i = 0; i + 1 < k; ++i) e[i] = L.beta[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  return es;
}

double sparse_norm_bound(const SpMat& H) {
  double best = 0.0;
  for (int r = 0; r < H.outerSize(); ++r) {
    double s = 0.0;
    for (SpMat::InnerIterator it(H, r); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

SpMat interaction(const model::DiscretizedModel& model, const fock::FockBasis& basis) {
  if (static_cast<int>(model.coupling.size()) != basis.mode_count())
    throw ConfigError("assemble: model and basis mode counts differ");
  const auto S = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index E = model.electron_dim();
  std::vector<Eigen::Triplet<cd>> trip;
  for (int m = 0; m < basis.mode_count(); ++m) {
    const SpMat a = fock::creation(basis, m);
    const SpMat& G = model.coupling[m];
    for (int r = 0; r < G.outerSize(); ++r)
      for (SpMat::InnerIterator ig(G, r); ig; ++ig)
        for (int q = 0; q < a.outerSize(); ++q)
          for (SpMat::InnerIterator ia(a, q); ia; ++ia) {
            const cd v = ig.value() * ia.value();
            trip.emplace_back(ig.row() * S + ia.row(), ig.col() * S + ia.col(), v);
            trip.emplace_back(ig.col() * S + ia.col(), ig.row() * S + ia.row(), std::conj(v));
          }
  }
  SpMat W(E * S, E * S);
  W.setFromTriplets(trip.begin(), trip.end());
  W.makeCompressed();
  return W;
}

System assemble(const model::DiscretizedModel& model, double g, const fock::FockBasis& basis) {
  if (!(g >= 0.0)) throw ConfigError("assemble: g must be >= 0");
  if (model.mode_count() != basis.mode_count()) throw ConfigError("assemble: mode counts differ");
  System sys{model, basis, g, {}, {}, {}, model.omegas(), {}};
  const auto S = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index E = model.electron_dim();
  const RVec eel = model.electron_energies();
  const RVec ef = fock::field_hamiltonian(basis, sys.omegas).entries.diagonal().real();
  std::vector<Eigen::Triplet<cd>> trip;
  trip.reserve(static_cast<std::size_t>(E * S));
  for (Eigen::Index e = 0; e < E; ++e)
    for (Eigen::Index s = 0; s < S; ++s) trip.emplace_back(e * S + s, e * S + s, eel[e] + ef[s]);
  sys.H0.resize(E * S, E * S);
  sys.H0.setFromTriplets(trip.begin(), trip.end());
  sys.H0.makeCompressed();
  sys.W = interaction(model, basis);
  if (g == 0.0) {
    sys.H = sys.H0;
  } else {
    sys.H = sys.H0 + g * sys.W;
    sys.H.makeCompressed();
  }
  for (int m = 0; m < basis.mode_count(); ++m) sys.creators.push_back(fock::creation(basis, m));
  return sys;
}

}  // namespace photoion::dynamics

namespace photoion {

bool MomentumRegion::contains(const Vec3& p, int dim) const {
  if (all_space) return true;
  const double r = p.norm();
  if (r < p_min || r > p_max) return false;
  if (dim == 1 && !signs.empty()) {
    const int s = p[0] >= 0.0 ? 1 : -1;
    if (std::find(signs.begin(), signs.end(), s) == signs.end()) return false;
  }
  if (dim == 3 && angular && r > 0.0 && !angular(p / r)) return false;
  return true;
}

void MomentumRegion::validate() const {
  if (!(p_min >= 0.0)) throw ConfigError("MomentumRegion: p_min must be >= 0");
  if (!(p_max >= p_min)) throw ConfigError("MomentumRegion: p_max must be >= p_min");
  for (int s : signs)
    if (s != 1 && s != -1) throw ConfigError("MomentumRegion: signs must be +1 or -1");
}

}  // namespace photoion

namespace photoion::dynamics {

Mat position_cutoff(const model::DiscretizedModel& model, double R) {
  if (!(R >= 0.0)) throw ConfigError("position_cutoff: R must be >= 0");
  if (R > model.grid_extent()) throw ConfigError("position_cutoff: R exceeds the position-grid extent");
  const int P = model.P();
  const model::ElectronFourier fourier(model.points_per_axis, model.h_x, model.dim);
  Mat U = fourier.matrix();
  Vec mask(P);
  for (int j = 0; j < P; ++j) mask[j] = model.positions[j].norm() > R ? 1.0 : 0.0;
  Mat F = Mat::Zero(P + 1, P + 1);
  F.topLeftCorner(P, P) = U * mask.asDiagonal() * U.adjoint();
  return F;
}

Mat momentum_projector(const model::DiscretizedModel& model, const MomentumRegion& region) {
  region.validate();
  const int P = model.P();
  Mat T = Mat::Zero(P + 1, P + 1);
  for (int i = 0; i < P; ++i) T(i, i) = region.contains(model.momenta[i], model.dim) ? 1.0 : 0.0;
  return T;
}

Mat continuum_projector(const model::DiscretizedModel& model) {
  Mat Pc = Mat::Identity(model.electron_dim(), model.electron_dim());
  Pc(model.bound_index(), model.bound_index()) = 0.0;
  return Pc;
}

Mat bound_projector(const model::DiscretizedModel& model) {
  Mat Pd = Mat::Zero(model.electron_dim(), model.electron_dim());
  Pd(model.bound_index(), model.bound_index()) = 1.0;
  return Pd;
}

Vec bound_vacuum(const System& sys) {
  Vec v = Vec::Zero(static_cast<Eigen::Index>(sys.dim()));
  v[static_cast<Eigen::Index>(sys.model.bound_index() * sys.photon_dim())] = 1.0;
  return v;
}

GroundStateResult ground_state(const System& sys, const GroundStateOptions& opt) {
  if (!(opt.tol > 0.0)) throw ConfigError("ground_state: tol must be positive");
  const double scale = std::max(1.0, sparse_norm_bound(sys.H));
  auto op = [&](const Vec& x) -> Vec { return sys.H * x; };
  Vec v = bound_vacuum(sys);
  GroundStateResult res;
  double theta = 0.0;
  for (int restart = 0; restart < opt.max_restarts; ++restart) {
    const int m = static_cast<int>(std::min<std::size_t>(opt.krylov_dim, sys.dim()));
    const Lanczos L = lanczos(op, v, m, scale);
    const auto es = tridiag_eig(L);
    theta = es.eigenvalues()[0];
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    Vec x = Vec::Zero(v.size());
    for (std::size_t j = 0; j < L.V.size(); ++j) x += y[static_cast<Eigen::Index>(j)] * L.V[j];
    x.normalize();
    res.iterations = restart + 1;
    const double rq = x.dot(sys.H * x).real();
    const double resid = (sys.H * x - rq * x).norm();
    v = x;
    theta = rq;
    res.residual = resid;
    if (resid <= opt.tol || L.breakdown) break;
  }
  if (res.residual > opt.tol)
    throw ConvergenceError("ground_state: residual " + std::to_string(res.residual) + " above tol");
  // phase: <bound (x) vacuum, phi> real positive
  const auto b = static_cast<Eigen::Index>(sys.model.bound_index() * sys.photon_dim());
  if (std::abs(v[b]) > 0.0) v *= std::conj(v[b]) / std::abs(v[b]);
  res.E0 = theta;
  res.phi_gs = v;
  const auto S = static_cast<Eigen::Index>(sys.photon_dim());
  const Eigen::Index E = static_cast<Eigen::Index>(sys.electron_dim());
  Eigen::Map<const Mat> X(v.data(), S, E);
  res.overlap_perp = X.bottomRows(S - 1).norm();
  res.continuum_weight = X.leftCols(E - 1).norm();
  return res;
}

Vec evolve(const SpMat& H, const Vec& psi, double t, double tol, double shift, const EvolveOptions& opt) {
  if (!(tol > 0.0)) throw ConfigError("evolve: tol must be positive");
  if (H.rows() != H.cols() || H.rows() != psi.size()) throw ConfigError("evolve: dimension mismatch");
  if (t == 0.0) return psi;
  const double nrm = psi.norm();
  if (nrm == 0.0) return psi;
  const double scale = std::max(1.0, sparse_norm_bound(H) + std::abs(shift));
  auto op = [&](const Vec& x) -> Vec { return H * x - shift * x; };
  const double total = std::abs(t), sgn = t > 0 ? 1.0 : -1.0;
  double remaining = total;
  Vec cur = psi;
  const int m = static_cast<int>(std::min<Eigen::Index>(opt.krylov_dim, H.rows()));
  while (remaining > 0.0) {
    const double beta0 = cur.norm();
    const Lanczos L = lanczos(op, cur, m, scale);
    const auto es = tridiag_eig(L);
    const int k = static_cast<int>(L.alpha.size());
    const double beta_next = L.breakdown ? 0.0 : L.beta.back();
    const Eigen::VectorXd q0 = es.eigenvectors().row(0).transpose();
    auto coeffs = [&](double tau) {
      Eigen::VectorXcd w(k);
      for (int i = 0; i < k; ++i) w[i] = std::polar(q0[i], -sgn * tau * es.eigenvalues()[i]);
      return Eigen::VectorXcd(es.eigenvectors().cast<cd>() * w);
    };
    double tau = remaining;
    Eigen::VectorXcd y;
    while (true) {
      y = coeffs(tau);
      const double err = beta0 * beta_next * std::abs(y[k - 1]);
      if (err <= 0.5 * tol * tau / total) break;
      tau *= 0.5;
      if (tau < opt.min_step * total)
        throw ConvergenceError("evolve: step size fell below the minimum");
    }
    Vec next = Vec::Zero(cur.size());
    for (int j = 0; j < k; ++j) next += (beta0 * y[j]) * L.V[static_cast<std::size_t>(j)];
    cur = std::move(next);
    remaining = (tau >= remaining) ? 0.0 : remaining - tau;
  }
  return cur;
}

Vec cloud_state(const System& sys, const GroundStateResult& gs, const fock::PhotonCloud& cloud,
                double tau, double tol) {
  if (cloud.total() > sys.basis.max_total()) throw ConfigError("cloud_state: cloud.N exceeds N_max");
  if (tau == 0.0) return fock::apply_photon(fock::cloud_product(sys.basis, cloud), gs.phi_gs);
  const SpMat A = fock::cloud_product(sys.basis, cloud.phased(sys.omegas, -tau));
  const Vec x = fock::apply_photon(A, gs.phi_gs);
  return evolve(sys.H, x, tau, tol, gs.E0);
}

std::string to_string(TauRegime r) {
  switch (r) {
    case TauRegime::short_time: return "short";
    case TauRegime::long_time: return "long";
    default: return "uncovered-by-theorem";
  }
}

TauRegime classify_tau(double tau, double g, int K) {
  if (g <= 0.0) return tau == 0.0 ? TauRegime::short_time : TauRegime::long_time;
  const double mu = 1.0 - 1.0 / K;
  if (tau <= std::pow(g, mu)) return TauRegime::short_time;
  if (tau >= std::pow(g, -1.0 / K)) return TauRegime::long_time;
  return TauRegime::uncovered;
}

namespace {
double measured_charge(const System& sys, const Vec& x, const Mat& TF) {
  const auto S = static_cast<Eigen::Index>(sys.photon_dim());
  const auto E = static_cast<Eigen::Index>(sys.electron_dim());
  Eigen::Map<const Mat> X(x.data(), S, E);
  return (X * TF.transpose()).squaredNorm();
}
}  // namespace

TransportResult transported_charge(const System& sys, const Vec& psi, double R, double t,
                                   const MomentumRegion& region, double tol) {
  if (!(t >= 0.0)) throw ConfigError("transported_charge: t must be >= 0");
  const Mat TF = momentum_projector(sys.model, region) * position_cutoff(sys.model, R);
  const Vec x = evolve(sys.H, psi, t, tol);
  TransportResult out;
  out.R = R;
  out.t = t;
  out.region_id = region.id;
  out.charge = measured_charge(sys, x, TF);
  return out;
}

std::vector<std::vector<double>> charge_table(const System& sys, const Vec& psi,
                                              const std::vector<double>& R_list,
                                              const std::vector<double>& t_grid,
                                              const MomentumRegion& region, double tol) {
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw ConfigError("charge_table: t grid must be sorted");
  const Mat T = momentum_projector(sys.model, region);
  std::vector<Mat> TF;
  for (double R : R_list) TF.push_back(T * position_cutoff(sys.model, R));
  std::vector<std::vector<double>> out(R_list.size(), std::vector<double>(t_grid.size()));
  Vec x = psi;
  double now = 0.0;
  const double step_tol = tol / std::max<std::size_t>(1, t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0.0) throw ConfigError("charge_table: t must be >= 0");
    x = evolve(sys.H, x, t_grid[i] - now, step_tol);
    now = t_grid[i];
    for (std::size_t r = 0; r < R_list.size(); ++r) out[r][i] = measured_charge(sys, x, TF[r]);
  }
  return out;
}

Plateau windowed_plateau(const std::vector<double>& t_grid, const std::vector<double>& charges,
                         double variation) {
  Plateau best;
  const std::size_t n = charges.size();
  for (std::size_t i = 0; i < n; ++i) {
    double lo = charges[i], hi = charges[i], sum = 0.0;
    for (std::size_t j = i; j < n; ++j) {
      lo = std::min(lo, charges[j]);
      hi = std::max(hi, charges[j]);
      sum += charges[j];
      const double mean = sum / double(j - i + 1);
      const bool flat = mean > 0.0 ? (hi - lo) <= variation * mean : hi == lo;
      if (!flat) break;
      const int pts = static_cast<int>(j - i + 1);
      if (pts >= 2 && pts > best.points) {
        best = {true, mean, t_grid[i], t_grid[j], pts};
      }
    }
  }
  return best;
}

PPDecayTable pp_charge_decay(const System& sys, const Vec& psi, const std::vector<double>& R_list,
                             const std::vector<double>& t_grid, std::size_t max_dense_dim) {
  if (sys.dim() > max_dense_dim)
    throw BudgetError("pp_charge_decay: dense eigendecomposition unavailable for dimension " +
                      std::to_string(sys.dim()));
  const Mat H = Mat(sys.H);
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  if (es.info() != Eigen::Success) throw ConvergenceError("pp_charge_decay: eigensolver failed");
  const std::size_t S = sys.photon_dim();
  PPDecayTable out;
  out.reference_radius = 0.5 * sys.model.grid_extent();
  const Mat F0 = position_cutoff(sys.model, out.reference_radius);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Vec v = es.eigenvectors().col(i);
    const double loc = fock::apply_electron(F0, v, S).norm();
    if (es.eigenvalues()[i] < 0.0 || loc < 0.1) keep.push_back(i);
  }
  out.retained_eigenvectors = static_cast<int>(keep.size());
  const Eigen::Index n = static_cast<Eigen::Index>(keep.size());
  Vec c(n);
  RVec E(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    c[k] = es.eigenvectors().col(keep[k]).dot(psi);
    E[k] = es.eigenvalues()[keep[k]];
  }
  for (double R : R_list) {
    const Mat F = position_cutoff(sys.model, R);
    Mat Z(static_cast<Eigen::Index>(sys.dim()), n);
    for (Eigen::Index k = 0; k < n; ++k) Z.col(k) = fock::apply_electron(F, es.eigenvectors().col(keep[k]), S);
    double sup = 0.0;
    for (double t : t_grid) {
      Vec w(n);
      for (Eigen::Index k = 0; k < n; ++k) w[k] = c[k] * std::polar(1.0, -t * E[k]);
      sup = std::max(sup, (Z * w).norm());
    }
    out.R.push_back(R);
    out.sup_norm.push_back(sup);
  }
  return out;
}

}  // namespace photoion::dynamics
