// test_dynamics.cpp — Hamiltonian assembly, ground state, propagation, transported charge
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "photoion/dynamics.hpp"
#include "photoion/dyson.hpp"

using namespace photoion;

namespace {

model::DiscretizedModel toy(int P, int n_radial, const std::string& preset = "gaussian-toy", double h_x = 0.75) {
  std::map<std::string, double> params = {{"e0", -1.0}};
  if (preset == "dipole") params["R"] = 3.0;
  model::GridParams gp;
  gp.modes.n_radial = n_radial;
  gp.electron = {P, h_x};
  return model::discretize(model::preset(preset, params), gp);
}

double max_abs(const SpMat& m) {
  double mx = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
  return mx;
}

// F_R on the momentum grid built directly from U_ij = n^{-1/2} exp(-i p_i x_j).
Mat cutoff_oracle(const model::DiscretizedModel& m, double R) {
  const int P = m.P();
  Mat U(P, P);
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j)
      U(i, j) = std::exp(cd(0.0, -m.momenta[i][0] * m.positions[j][0])) / std::sqrt(double(P));
  Mat D = Mat::Zero(P, P);
  for (int j = 0; j < P; ++j) D(j, j) = std::abs(m.positions[j][0]) > R ? 1.0 : 0.0;
  Mat F = Mat::Zero(P + 1, P + 1);
  F.topLeftCorner(P, P) = U * D * U.adjoint();
  return F;
}

fock::PhotonCloud gaussian_cloud(const model::DiscretizedModel& m, double center) {
  Vec f = Vec::Zero(m.mode_count());
  for (int i = 0; i < m.mode_count(); ++i) f[i] = std::exp(-std::pow(m.modes[i].omega - center, 2));
  f.normalize();
  return fock::PhotonCloud{{f}, {1}};
}

}  // namespace

TEST_CASE("assembly: g = 0, bound block, hermiticity") {
  const auto m = toy(16, 2, "dipole");
  const auto basis = fock::build_basis(m.mode_count(), 2, m.electron_dim());
  const auto s0 = dynamics::assemble(m, 0.0, basis);
  CHECK(max_abs(SpMat(s0.H - s0.H0)) == 0.0);
  const auto s = dynamics::assemble(m, 0.3, basis);
  CHECK(max_abs(SpMat(s.H - SpMat(s.H.adjoint()))) == 0.0);
  CHECK(s.dim() == std::size_t(17) * basis.size());
  const Mat Pd = dynamics::bound_projector(m);
  const SpMat PdS = fock::tensor(SpMat(Pd.sparseView()), fock::identity(basis.size()));
  CHECK(max_abs(SpMat(PdS * s.W * PdS)) == 0.0);
}

TEST_CASE("ground state at g = 0 is the bound level times the vacuum") {
  const auto m = toy(32, 2);
  const auto basis = fock::build_basis(m.mode_count(), 2, m.electron_dim());
  const auto s = dynamics::assemble(m, 0.0, basis);
  const auto gs = dynamics::ground_state(s);
  CHECK(gs.E0 == -1.0);
  CHECK((gs.phi_gs - dynamics::bound_vacuum(s)).norm() == 0.0);
  CHECK(gs.overlap_perp == 0.0);
  CHECK(gs.continuum_weight == 0.0);
}

TEST_CASE("ground state against a dense eigensolver") {
  const auto m = toy(8, 1);
  const auto basis = fock::build_basis(m.mode_count(), 2, m.electron_dim());
  REQUIRE(m.electron_dim() * basis.size() <= 200);
  for (double g : {0.1, 0.4}) {
    const auto s = dynamics::assemble(m, g, basis);
    dynamics::GroundStateOptions go;
    go.tol = 1e-12;
    const auto gs = dynamics::ground_state(s, go);
    Eigen::SelfAdjointEigenSolver<Mat> es{Mat(s.H)};
    CHECK(std::abs(gs.E0 - es.eigenvalues()[0]) < 1e-10);
    CHECK(std::abs(std::abs(es.eigenvectors().col(0).dot(gs.phi_gs)) - 1.0) < 1e-10);
    CHECK(gs.continuum_weight > 0.0);
  }
}

TEST_CASE("ground-state energy shift is quadratic in g") {
  const auto m = toy(32, 2);
  const auto basis = fock::build_basis(m.mode_count(), 2, m.electron_dim());
  std::vector<double> g = {0.02, 0.04, 0.08}, dE;
  for (double x : g) {
    const auto gs = dynamics::ground_state(dynamics::assemble(m, x, basis));
    dE.push_back(-1.0 - gs.E0);
    CHECK(gs.phi_gs.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gs.residual <= 1e-10);
  }
  CHECK(std::abs(dyson::loglog_slope(g, dE) - 2.0) <= 0.1);
}

TEST_CASE("evolve") {
  std::mt19937 rng(17);
  std::normal_distribution<double> d;
  const int n = 100;
  Mat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cd(d(rng), d(rng));
  const Mat Hd = 0.5 * (A + A.adjoint()) / std::sqrt(double(n));
  const SpMat H = Hd.sparseView();
  Vec psi(n);
  for (int i = 0; i < n; ++i) psi[i] = cd(d(rng), d(rng));
  psi.normalize();
  CHECK((dynamics::evolve(H, psi, 0.0, 1e-10) - psi).norm() == 0.0);
  CHECK((dynamics::evolve(H, psi, 1.7, 1e-11) - oracle::expm_hermitian(Hd, 1.7) * psi).norm() < 1e-9);
  CHECK((dynamics::evolve(H, psi, -2.3, 1e-11, 0.4) - std::exp(cd(0.0, -2.3 * 0.4)) *
                                                           oracle::expm_hermitian(Hd, -2.3) * psi)
            .norm() < 1e-9);
  Eigen::SelfAdjointEigenSolver<Mat> es(Hd);
  const Vec v = es.eigenvectors().col(7);
  const double E = es.eigenvalues()[7];
  CHECK((dynamics::evolve(H, v, 3.0, 1e-11) - std::exp(cd(0.0, -3.0 * E)) * v).norm() < 1e-10);
}

TEST_CASE("cloud state") {
  const auto m = toy(16, 1);
  const auto basis = fock::build_basis(m.mode_count(), 2, m.electron_dim());
  const auto cloud = gaussian_cloud(m, 2.0);
  const auto s0 = dynamics::assemble(m, 0.0, basis);
  const auto gs0 = dynamics::ground_state(s0);
  const Vec A0 = fock::apply_photon(fock::cloud_product(basis, cloud), gs0.phi_gs);
  CHECK((dynamics::cloud_state(s0, gs0, cloud, 0.0, 1e-12) - A0).norm() == 0.0);
  CHECK((dynamics::cloud_state(s0, gs0, cloud, 0.7, 1e-12) - A0).norm() < 1e-11);

  // g = 0.05: A(tau) Phi - A Phi = -i g int_0^tau e^{-is(H-E0)} [W, A_{-s}] Phi ds
  const double g = 0.05, tau = 0.3;
  const auto s = dynamics::assemble(m, g, basis);
  dynamics::GroundStateOptions go;
  go.tol = 1e-13;
  const auto gs = dynamics::ground_state(s, go);
  const Vec direct = dynamics::cloud_state(s, gs, cloud, tau, 1e-12) - dynamics::cloud_state(s, gs, cloud, 0.0, 1e-12);
  const Mat H(s.H), W(s.W);
  std::vector<double> x, w;
  oracle::legendre_rule(24, 0.0, tau, x, w);
  Vec integral = Vec::Zero(H.rows());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Mat A(fock::tensor(fock::identity(m.electron_dim()), fock::cloud_product(basis, cloud.phased(s.omegas, -x[i]))));
    const Vec c = (W * A - A * W) * gs.phi_gs;
    integral += w[i] * std::exp(cd(0.0, x[i] * gs.E0)) * (oracle::expm_hermitian(H, x[i]) * c);
  }
  const Vec duhamel = cd(0.0, -g) * integral;
  CHECK((direct - duhamel).norm() < 1e-9);
  CHECK(direct.norm() > 1e-4);
}

TEST_CASE("transported charge") {
  const auto m = toy(32, 2);
  const auto basis = fock::build_basis(m.mode_count(), 1, m.electron_dim());
  MomentumRegion all;
  all.all_space = true;
  const auto s0 = dynamics::assemble(m, 0.0, basis);
  std::mt19937 rng(2);
  std::normal_distribution<double> d;
  // bound level (x) arbitrary photon state at g = 0
  Vec psi = Vec::Zero(s0.dim());
  for (std::size_t k = 0; k < basis.size(); ++k) psi[m.bound_index() * basis.size() + k] = cd(d(rng), d(rng));
  for (double R : {0.0, 3.0})
    for (double t : {0.0, 5.0}) CHECK(dynamics::transported_charge(s0, psi, R, t, all, 1e-12).charge == 0.0);

  // electron localized in |x| < R at t = 0
  const model::ElectronFourier fourier(m.points_per_axis, m.h_x, 1);
  Vec xloc = Vec::Zero(m.P());
  for (int j = 0; j < m.P(); ++j)
    if (std::abs(m.positions[j][0]) < 4.0) xloc[j] = cd(d(rng), d(rng));
  const Vec ploc = fourier.to_momentum(xloc);
  Vec psi2 = Vec::Zero(s0.dim());
  for (int i = 0; i < m.P(); ++i) psi2[i * basis.size()] = ploc[i];
  psi2.normalize();
  CHECK(dynamics::transported_charge(s0, psi2, 4.0, 0.0, all, 1e-12).charge < 1e-12);

  // dense oracle at g = 0.1
  const auto s = dynamics::assemble(m, 0.1, basis);
  MomentumRegion right;
  right.p_min = 0.5;
  right.signs = {1};
  const Mat T = dynamics::momentum_projector(m, right);
  for (int i = 0; i < m.P(); ++i) CHECK(T(i, i) == cd((m.momenta[i][0] >= 0.5) ? 1.0 : 0.0));
  const double R = 3.0, t = 4.0;
  const Mat F = cutoff_oracle(m, R);
  CHECK((dynamics::position_cutoff(m, R) - F).cwiseAbs().maxCoeff() < 1e-13);
  const Mat TF = oracle::kron(T * F, Mat::Identity(basis.size(), basis.size()));
  const Vec ev = oracle::expm_hermitian(Mat(s.H), t) * psi2;
  const double ref = (TF * ev).squaredNorm();
  CHECK(std::abs(dynamics::transported_charge(s, psi2, R, t, right, 1e-12).charge - ref) < 1e-9);
  const auto tab = dynamics::charge_table(s, psi2, {R, 5.0}, {0.0, 2.0, t}, right, 1e-12);
  CHECK(std::abs(tab[0][2] - ref) < 1e-9);
}

TEST_CASE("plateau detection and tau classification") {
  const std::vector<double> t = {1, 2, 3, 4, 5, 6, 7};
  const std::vector<double> q = {0.1, 0.5, 0.98, 1.0, 1.01, 0.99, 0.3};
  const auto p = dynamics::windowed_plateau(t, q, 0.05);
  CHECK(p.found);
  CHECK(p.t_begin == 3);
  CHECK(p.t_end == 6);
  CHECK(p.points == 4);
  CHECK(dynamics::classify_tau(0.1, 0.01, 2) == dynamics::TauRegime::short_time);
  CHECK(dynamics::classify_tau(20.0, 0.01, 2) == dynamics::TauRegime::long_time);
  CHECK(dynamics::classify_tau(1.0, 0.01, 2) == dynamics::TauRegime::uncovered);
}

TEST_CASE("point-spectrum charge decay") {
  const auto m = toy(16, 1);
  const auto basis = fock::build_basis(m.mode_count(), 2, m.electron_dim());
  const auto s = dynamics::assemble(m, 0.1, basis);
  dynamics::GroundStateOptions go;
  go.tol = 1e-13;
  const auto gs = dynamics::ground_state(s, go);
  const std::vector<double> R = {1.0, 2.0, 3.0, 5.0};
  const std::vector<double> tg = {0.0, 0.5, 1.0, 2.5, 4.0};
  const auto tab = dynamics::pp_charge_decay(s, gs.phi_gs, R, tg);
  for (std::size_t r = 0; r < R.size(); ++r) {
    const Vec F = fock::apply_electron(cutoff_oracle(m, R[r]), gs.phi_gs, basis.size());
    CHECK(std::abs(tab.sup_norm[r] - F.norm()) < 1e-9);
  }

  // a mixed state, propagated by the dense exponential
  const auto cloud = gaussian_cloud(m, 0.5);
  const Vec psi = fock::apply_photon(fock::cloud_product(basis, cloud), gs.phi_gs);
  const auto mix = dynamics::pp_charge_decay(s, psi, R, tg);
  const Mat H(s.H);
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  const Mat F0 = oracle::kron(cutoff_oracle(m, mix.reference_radius), Mat::Identity(basis.size(), basis.size()));
  Vec pp = Vec::Zero(H.rows());
  int kept = 0;
  for (Eigen::Index k = 0; k < H.rows(); ++k) {
    const Vec v = es.eigenvectors().col(k);
    if (es.eigenvalues()[k] < 0.0 || (F0 * v).norm() < 0.1) {
      pp += v * v.dot(psi);
      ++kept;
    }
  }
  CHECK(kept == mix.retained_eigenvectors);
  for (std::size_t r = 0; r < R.size(); ++r) {
    const Mat FR = oracle::kron(cutoff_oracle(m, R[r]), Mat::Identity(basis.size(), basis.size()));
    double sup = 0.0;
    for (double t : tg) sup = std::max(sup, (FR * (oracle::expm_hermitian(H, t) * pp)).norm());
    CHECK(std::abs(mix.sup_norm[r] - sup) < 1e-9);
    if (r > 0) CHECK(mix.sup_norm[r] <= mix.sup_norm[r - 1]);
  }
  CHECK_THROWS_AS(dynamics::pp_charge_decay(s, psi, R, tg, 10), BudgetError);
}
