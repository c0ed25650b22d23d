// bogoliubov.cpp — field-shift gauge and its fixed point
#include "photoion/bogoliubov.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "photoion/fock.hpp"

namespace photoion::bogoliubov {

void BogoliubovProblem::validate() const {
  const Eigen::Index E = h_el.rows();
  if (E < 2 || h_el.cols() != E) throw ConfigError("bogoliubov: h_el must be square with dimension >= 2");
  if ((h_el - h_el.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw ConfigError("bogoliubov: h_el not hermitian");
  if (G.empty()) throw ConfigError("bogoliubov: no modes");
  if (omega.size() != mode_count() || weight.size() != mode_count())
    throw ConfigError("bogoliubov: omega/weight size mismatch");
  for (int m = 0; m < mode_count(); ++m) {
    if (G[m].rows() != E || G[m].cols() != E) throw ConfigError("bogoliubov: G_m dimension mismatch");
    if (!(omega[m] > 0.0) || !(weight[m] > 0.0)) throw ConfigError("bogoliubov: omega and weight must be positive");
  }
}

BogoliubovProblem from_model(const model::DiscretizedModel& model) {
  BogoliubovProblem p;
  p.name = "model";
  const RVec e = model.electron_energies();
  p.h_el = e.cast<cd>().asDiagonal();
  for (const auto& G : model.coupling) p.G.push_back(Mat(G));
  p.omega = model.omegas();
  p.weight.resize(model.mode_count());
  for (int m = 0; m < model.mode_count(); ++m) p.weight[m] = model.modes[m].weight;
  p.validate();
  return p;
}

BogoliubovProblem schrodinger_toy(const SchrodingerToyParams& q) {
  if (q.points < 8 || !(q.h_x > 0.0)) throw ConfigError("schrodinger_toy: bad grid");
  if (!(q.a > 0.0) || !(q.b > 0.0) || !(q.sigma_k > 0.0)) throw ConfigError("schrodinger_toy: widths must be positive");
  const int n = q.points;
  BogoliubovProblem p;
  p.name = "schrodinger-toy";
  p.h_el = Mat::Zero(n, n);
  const double inv = 1.0 / (q.h_x * q.h_x);
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = (i - n / 2) * q.h_x;
    p.h_el(i, i) = 2.0 * inv - q.V0 * std::exp(-x[i] * x[i] / (2.0 * q.a * q.a));
    p.h_el(i, (i + 1) % n) = -inv;
    p.h_el((i + 1) % n, i) = -inv;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(p.h_el, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues()[0] < 0.0) || es.eigenvalues()[1] < 0.0)
    throw ConfigError("schrodinger_toy: potential must bind exactly one state");
  for (const model::Mode& md : model::mode_grid(q.modes, 1)) {
    Mat G = Mat::Zero(n, n);
    const double kf = std::exp(-md.omega * md.omega / (2.0 * q.sigma_k * q.sigma_k)) * std::sqrt(md.weight);
    for (int i = 0; i < n; ++i) G(i, i) = q.c * std::exp(-x[i] * x[i] / (2.0 * q.b * q.b)) * kf;
    p.G.push_back(G);
  }
  const int M = static_cast<int>(p.G.size());
  p.omega.resize(M);
  p.weight.resize(M);
  int m = 0;
  for (const model::Mode& md : model::mode_grid(q.modes, 1)) {
    p.omega[m] = md.omega;
    p.weight[m] = md.weight;
    ++m;
  }
  p.validate();
  return p;
}

BogoliubovProblem two_level_toy(double gamma0, double gamma1, double omega, double gap) {
  if (!(gap > 0.0)) throw ConfigError("two_level_toy: gap must be positive");
  BogoliubovProblem p;
  p.name = "two-level";
  p.h_el = Mat::Zero(2, 2);
  p.h_el(1, 1) = gap;
  Mat G = Mat::Zero(2, 2);
  G(0, 0) = gamma0;
  G(1, 1) = gamma1;
  p.G = {G};
  p.omega = RVec::Constant(1, omega);
  p.weight = RVec::Ones(1);
  p.validate();
  return p;
}

Mat delta_V(const Vec& h, const BogoliubovProblem& prob) {
  if (h.size() != prob.mode_count()) throw ConfigError("delta_V: h has the wrong length");
  const Eigen::Index E = prob.electron_dim();
  Mat out = Mat::Zero(E, E);
  for (int m = 0; m < prob.mode_count(); ++m) {
    if (h[m] == cd(0.0)) continue;
    out += std::conj(h[m]) * prob.G[m] + h[m] * prob.G[m].adjoint();
  }
  return out;
}

namespace {
Vec ground_vector(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return es.eigenvectors().col(0);
}
}  // namespace

ElectronGround perturbed_ground(const Vec& h, double g, const BogoliubovProblem& prob) {
  const Vec phi0 = ground_vector(prob.h_el);
  Mat H = prob.h_el;
  if (g != 0.0) H += g * g * delta_V(h, prob);
  H = 0.5 * (H + H.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  ElectronGround out;
  out.energy = es.eigenvalues()[0];
  out.gap = es.eigenvalues()[1] - es.eigenvalues()[0];
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (!(out.gap > 1e-10 * scale)) throw ConvergenceError("perturbed_ground: lowest eigenvalue is not separated");
  Vec v = es.eigenvectors().col(0);
  const cd ov = phi0.dot(v);
  if (std::abs(ov) < 1e-12) throw ConvergenceError("perturbed_ground: eigenvector orthogonal to phi_0");
  v *= std::abs(ov) / ov;
  out.vector = v;
  return out;
}

namespace {
Vec expectation_over_omega(const Vec& phi, const BogoliubovProblem& prob) {
  Vec out(prob.mode_count());
  for (int m = 0; m < prob.mode_count(); ++m) out[m] = -phi.dot(prob.G[m] * phi) / prob.omega[m];
  return out;
}
}  // namespace

Vec h0_vector(const BogoliubovProblem& prob) { return expectation_over_omega(ground_vector(prob.h_el), prob); }

Vec t_map(const Vec& h, double g, const BogoliubovProblem& prob) {
  const Vec h0 = h0_vector(prob);
  if (h.size() != h0.size()) throw ConfigError("t_map: h has the wrong length");
  const ElectronGround eg = perturbed_ground(h0 + h, g, prob);
  return expectation_over_omega(eg.vector, prob) - h0;
}

BogoliubovResult solve_fixed_point(double g, const BogoliubovProblem& prob, double tol, int max_iter) {
  if (!(tol > 0.0)) throw ConfigError("solve_fixed_point: tol must be positive");
  if (!(g >= 0.0)) throw ConfigError("solve_fixed_point: g must be >= 0");
  prob.validate();
  const Vec h0 = h0_vector(prob);
  BogoliubovResult r;
  Vec h = Vec::Zero(prob.mode_count());
  double prev_step = -1.0;
  bool converged = false;
  for (int it = 1; it <= max_iter; ++it) {
    const Vec next = t_map(h, g, prob);
    const double step = (next - h).norm();
    r.iterations = it;
    if (prev_step > 0.0) {
      const double ratio = step / prev_step;
      r.contraction_ratios.push_back(ratio);
      if (ratio >= 1.0 && step > tol)
        throw ConvergenceError("solve_fixed_point: contraction ratio " + std::to_string(ratio) + " >= 1");
    }
    h = next;
    prev_step = step;
    if (step <= tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("solve_fixed_point: max_iter exceeded");
  r.h_g = h0 + h;
  const ElectronGround eg = perturbed_ground(r.h_g, g, prob);
  r.e_g = eg.energy;
  r.phi_g = eg.vector;
  r.fixed_point_residual = (h - t_map(h, g, prob)).norm();
  r.gauge_residual = gauge_residual(r.h_g, r.phi_g, prob);
  return r;
}

double gauge_residual(const Vec& h, const Vec& phi, const BogoliubovProblem& prob) {
  const int M = prob.mode_count();
  if (h.size() != M || phi.size() != prob.electron_dim()) throw ConfigError("gauge_residual: dimension mismatch");
  const fock::FockBasis basis(M, 1);
  const auto S = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index E = prob.electron_dim();
  const auto n = E * S;
  SpMat Wt(n, n);
  for (int m = 0; m < M; ++m) {
    const SpMat a = fock::creation(basis, m);
    const SpMat ad = a.adjoint();
    const SpMat Gm = prob.G[m].sparseView();
    const SpMat Gmd = Mat(prob.G[m].adjoint()).sparseView();
    Wt += fock::tensor(Gm, a) + fock::tensor(Gmd, ad);
    const SpMat id = fock::identity(E);
    Wt += fock::tensor(id, SpMat(prob.omega[m] * h[m] * a)) +
          fock::tensor(id, SpMat(prob.omega[m] * std::conj(h[m]) * ad));
  }
  const Mat Pi = phi * phi.adjoint();
  const SpMat Pg = fock::tensor(SpMat(Pi.sparseView()), fock::identity(S));
  const Mat proj = Mat(Pg * Wt * Pg);
  return proj.cwiseAbs().maxCoeff();
}

Vec unabsorbed(const Vec& h, const BogoliubovProblem& prob) {
  Vec out(h.size());
  for (Eigen::Index m = 0; m < h.size(); ++m) out[m] = h[m] / std::sqrt(prob.weight[m]);
  return out;
}

double transform_identity_residual(const BogoliubovProblem& prob, const Vec& h, double g, int n_max,
                                   int n_internal) {
  if (prob.mode_count() != 1) throw ConfigError("transform_identity_residual: single-mode problems only");
  if (n_internal <= n_max) throw ConfigError("transform_identity_residual: need n_internal > n_max");
  const int S = n_internal + 1;
  const Eigen::Index E = prob.electron_dim();
  Mat a = Mat::Zero(S, S);  // annihilation
  for (int k = 1; k < S; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const Mat ad = a.adjoint();
  const Mat Ie = Mat::Identity(E, E), If = Mat::Identity(S, S);
  auto kron = [](const Mat& A, const Mat& B) {
    Mat K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
  };
  const double w = prob.omega[0];
  const cd hm = h[0];
  const Mat& G = prob.G[0];
  const Mat Hf = w * ad * a;
  const Mat W = kron(G, ad) + kron(G.adjoint(), a);
  const Mat H = kron(prob.h_el, If) + kron(Ie, Hf) + g * W;
  const Mat X = g * (std::conj(hm) * a - hm * ad);
  const Mat u = X.exp();
  const Mat U = kron(Ie, u);
  const Mat lhs = U * H * U.adjoint();
  const Mat Wt = W + kron(Ie, w * (hm * ad + std::conj(hm) * a));
  const Mat rhs = kron(prob.h_el + g * g * delta_V(h, prob), If) + kron(Ie, Hf) + g * Wt +
                  g * g * w * std::norm(hm) * Mat::Identity(E * S, E * S);
  double err = 0.0;
  for (Eigen::Index e1 = 0; e1 < E; ++e1)
    for (int s1 = 0; s1 <= n_max; ++s1)
      for (Eigen::Index e2 = 0; e2 < E; ++e2)
        for (int s2 = 0; s2 <= n_max; ++s2)
          err = std::max(err, std::abs(lhs(e1 * S + s1, e2 * S + s2) - rhs(e1 * S + s1, e2 * S + s2)));
  return err;
}

nlohmann::json to_json(const BogoliubovResult& r) {
  nlohmann::json j;
  nlohmann::json h = nlohmann::json::array();
  for (Eigen::Index m = 0; m < r.h_g.size(); ++m) h.push_back({r.h_g[m].real(), r.h_g[m].imag()});
  j["h_g"] = h;
  j["e_g"] = r.e_g;
  j["iterations"] = r.iterations;
  j["contraction_ratios"] = r.contraction_ratios;
  j["fixed_point_residual"] = r.fixed_point_residual;
  j["gauge_residual"] = r.gauge_residual;
  return j;
}

}  // namespace photoion::bogoliubov
