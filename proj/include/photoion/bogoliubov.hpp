// bogoliubov.hpp — field-shift gauge: delta V, the map T_g, its fixed point, gauge residual
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "photoion/common.hpp"
#include "photoion/model.hpp"

namespace photoion::bogoliubov {

// Electron operator h_el and per-mode couplings G_m (sqrt(weight) absorbed), energies omega_m.
struct BogoliubovProblem {
  std::string name;
  Mat h_el;
  std::vector<Mat> G;
  RVec omega;
  RVec weight;

  int mode_count() const { return static_cast<int>(G.size()); }
  Eigen::Index electron_dim() const { return h_el.rows(); }
  void validate() const;
};

// h_el = diag(p^2, e0) with the model's G_m. The bound level has no diagonal coupling,
// so the fixed point is h = 0.
BogoliubovProblem from_model(const model::DiscretizedModel& model);

// -d^2/dx^2 - V0 exp(-x^2 / 2a^2) on a periodic grid (one bound state), coupled through
// the multiplication operator c exp(-x^2 / 2b^2) exp(-k^2 / 2 sigma_k^2) sqrt(w_m).
struct SchrodingerToyParams {
  int points = 64;
  double h_x = 0.5;
  double V0 = 1.0;
  double a = 1.0;
  double c = 1.0;
  double b = 1.5;
  double sigma_k = 2.0;
  model::ModeGridParams modes;
};
BogoliubovProblem schrodinger_toy(const SchrodingerToyParams& p);

// One mode, h_el = diag(0, gap), G = diag(gamma0, gamma1): the fixed point is h = -gamma0 / omega.
BogoliubovProblem two_level_toy(double gamma0, double gamma1, double omega, double gap);

// sum_m conj(h_m) G_m + h_m G_m^dagger (the shift a_m -> a_m + g h_m under U(h)).
Mat delta_V(const Vec& h, const BogoliubovProblem& prob);

struct ElectronGround {
  double energy = 0.0;
  double gap = 0.0;
  Vec vector;
};

// Lowest eigenpair of h_el + g^2 delta_V(h), phase-fixed so <phi_0, phi> > 0.
ElectronGround perturbed_ground(const Vec& h, double g, const BogoliubovProblem& prob);

// h0(m) = -<phi_0, G_m phi_0> / omega_m
Vec h0_vector(const BogoliubovProblem& prob);

// T_g(h) = -<phi_g(h0 + h), G^ phi_g(h0 + h)> - h0 with G^_m = G_m / omega_m.
Vec t_map(const Vec& h, double g, const BogoliubovProblem& prob);

struct BogoliubovResult {
  Vec h_g;                    // h0 + fixed point
  double e_g = 0.0;
  Vec phi_g;
  int iterations = 0;
  std::vector<double> contraction_ratios;
  double fixed_point_residual = 0.0;
  double gauge_residual = 0.0;
};

BogoliubovResult solve_fixed_point(double g, const BogoliubovProblem& prob, double tol = 1e-10,
                                   int max_iter = 200);

// max-norm of (Pi_g (x) 1) W~ (Pi_g (x) 1) on the N_max = 1 space,
// W~ = W + 1 (x) [a*(omega h) + a(omega h)].
double gauge_residual(const Vec& h, const Vec& phi, const BogoliubovProblem& prob);

// h_m / sqrt(w_m): coefficients as samples of a function of k.
Vec unabsorbed(const Vec& h, const BogoliubovProblem& prob);

// max-norm of U H_g U^dagger - [h~_el (x) 1 + 1 (x) H_f + g W~ + g^2 sum omega |h|^2] on the
// sectors n <= n_max, single-mode problems only; dense exponential on n_internal photons.
double transform_identity_residual(const BogoliubovProblem& prob, const Vec& h, double g, int n_max = 2,
                                   int n_internal = 32);

nlohmann::json to_json(const BogoliubovResult& r);

}  // namespace photoion::bogoliubov
