// dyson.hpp — commutator expansion, Phi_T vectors, Duhamel identity, dynamics-vs-formula comparisons
#pragma once

#include <string>
#include <vector>

#include "photoion/common.hpp"
#include "photoion/dynamics.hpp"
#include "photoion/fock.hpp"
#include "photoion/leading.hpp"
#include "photoion/model.hpp"
#include "photoion/region.hpp"

namespace photoion::dyson {

// Sum_j n_j <G|e^{-is omega} phi_j> (x) prod_i a*(e^{-is omega} phi_i)^{n_i - delta_ij}
// on the full tensor space, with <G|f> = sum_m f(m) G_m^dagger.
SpMat commutator_W_cloud(const dynamics::System& sys, const fock::PhotonCloud& cloud, double s);

// W A_s - A_s W by sparse matrix products.
SpMat brute_commutator(const dynamics::System& sys, const fock::PhotonCloud& cloud, double s);

// A_s = 1 (x) prod a*(e^{-is omega} phi_j)^{n_j} on the full tensor space.
SpMat cloud_tensor(const dynamics::System& sys, const fock::PhotonCloud& cloud, double s);

enum class Reference { interacting, bare };
enum class PhiRegime { short_time, long_time };
std::string to_string(Reference r);
std::string to_string(PhiRegime r);

struct PhiVector {
  Vec value;
  double horizon = 0.0;
  double tail_bound = 0.0;
  double fitted_exponent = 0.0;
  double quadrature_error = 0.0;
  Reference reference = Reference::bare;
  PhiRegime regime = PhiRegime::short_time;
};

// Half the discrete recurrence time 2 pi / d_omega (smallest gap between distinct mode energies).
double recurrence_horizon(const RVec& omegas);

// g^{mu - 1} with mu = 1 - 1/K, capped by recurrence_horizon.
double default_horizon(double g, int K, const RVec& omegas);

// Integral of exp(is(H0 - E0)) [W, A_s] P_d ref (commutator by its expansion) over [0, T] (short) or [-T, T] (long).
// ref is Phi_gs for Reference::interacting and bound (x) vacuum for Reference::bare.
PhiVector phi_vector(const dynamics::System& sys, const fock::PhotonCloud& cloud, const Vec& ref,
                     Reference reference, PhiRegime regime, double E0, double horizon, double tol,
                     double k_decay);

struct DuhamelResult {
  double residual = 0.0;
  double quadrature_error = 0.0;  // |I_n - I_{n/2}| of the Gauss–Legendre time integral
  int nodes = 0;
};

// || e^{-it(H_g-E0)} A Phi - A_t Phi + i g int_0^t e^{-i(t-s)(H_g-E0)} [W, A_s] Phi ds ||
DuhamelResult duhamel_residual(const dynamics::System& sys, const dynamics::GroundStateResult& gs,
                               const fock::PhotonCloud& cloud, double t, double tol);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct CompareOptions {
  double t = 6.0;                 // lhs evaluation time
  double tau = 0.0;
  PhiRegime regime = PhiRegime::short_time;
  double R = 8.0;                 // transport radius
  std::vector<double> t_grid;     // plateau search grid
  double plateau_variation = 0.05;
  double tol = 1e-9;
  double horizon = 0.0;           // 0 selects default_horizon(g)
  int K = 2;                      // smoothness degree for mu(K) and the tail fit
};

struct CompareRow {
  double g = 0.0;
  double E0 = 0.0;
  double horizon = 0.0;
  double lhs_error = 0.0;
  double formula_Q = 0.0;
  double dynamic_Q = 0.0;
  dynamics::Plateau plateau;
  std::vector<double> charges;    // Q(t) on the plateau grid
};

struct CompareTable {
  std::vector<CompareRow> rows;
  double lhs_slope = 0.0;         // over rows with g > 0
  double q_diff_slope = 0.0;      // slope of |dynamic_Q - formula_Q|
};

CompareTable theorem_compare(const model::DiscretizedModel& model, const fock::FockBasis& basis,
                             const fock::PhotonCloud& cloud, const MomentumRegion& region,
                             const std::vector<double>& g_list, const CompareOptions& opt);

// ---------------------------------------------------------------------------
// Discrete mode sums vs continuum charge

struct CrosscheckLevel {
  int n_radial = 0;
  double horizon = 0.0;
  double discrete = 0.0;
  double continuum = 0.0;
  double rel_diff = 0.0;
};

struct CrosscheckOptions {
  std::vector<int> levels = {32, 64, 128, 256};  // radial mode cells across the orbital support
  double horizon_fraction = 0.25;                 // T = fraction * 2 pi / d_omega
  model::ElectronGridParams electron{256, 0.75};  // points per axis at the coarsest level
  bool refine_electron = true;                    // electron points scale with n_radial
  leading::LeadingOptions leading;
};

struct CrosscheckResult {
  std::vector<CrosscheckLevel> levels;
  double discrete = 0.0;
  double continuum = 0.0;
  double rel_diff = 0.0;          // finest level
};

// Discrete ||T_T Phi^Omega||^2 from exact time integrals of the mode sums on refined d = 1 grids,
// against leading::charge_Q. The bare reference uses E0 = e0.
CrosscheckResult closed_form_crosscheck(const leading::ContinuumCloud& cloud, const MomentumRegion& region,
                                        const model::CouplingSpec& spec, leading::Regime regime,
                                        const CrosscheckOptions& opt = {});

// Discrete orbital phi(k_m) sqrt(w_m) on a mode list, normalized to one.
Vec sample_orbital(const leading::ContinuumOrbital& phi, const std::vector<model::Mode>& modes);

}  // namespace photoion::dyson
