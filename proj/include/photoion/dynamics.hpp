// dynamics.hpp — H_g assembly, ground state, propagation, transported charge
#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "photoion/common.hpp"
#include "photoion/fock.hpp"
#include "photoion/model.hpp"
#include "photoion/region.hpp"

namespace photoion::dynamics {

// Full tensor-space operators for one coupling g. Index layout e * S + s.
struct System {
  model::DiscretizedModel model;
  fock::FockBasis basis;
  double g = 0.0;
  SpMat H0;
  SpMat W;
  SpMat H;
  RVec omegas;
  std::vector<SpMat> creators;  // a*_m on the photon factor

  std::size_t photon_dim() const { return basis.size(); }
  std::size_t electron_dim() const { return static_cast<std::size_t>(model.electron_dim()); }
  std::size_t dim() const { return photon_dim() * electron_dim(); }
};

System assemble(const model::DiscretizedModel& model, double g, const fock::FockBasis& basis);

// W = sum_m G_m (x) a*_m + G_m^dagger (x) a_m.
SpMat interaction(const model::DiscretizedModel& model, const fock::FockBasis& basis);

using photoion::MomentumRegion;

// Electron-factor operators in the (momentum continuum + bound) basis.
Mat position_cutoff(const model::DiscretizedModel& model, double R);   // F_R: |x| > R
Mat momentum_projector(const model::DiscretizedModel& model, const MomentumRegion& region);  // T_T
Mat continuum_projector(const model::DiscretizedModel& model);         // P_c
Mat bound_projector(const model::DiscretizedModel& model);             // P_d

// bound level (x) vacuum
Vec bound_vacuum(const System& sys);

struct GroundStateResult {
  double E0 = 0.0;
  Vec phi_gs;
  double residual = 0.0;
  double overlap_perp = 0.0;      // |P_Omega^perp phi|
  double continuum_weight = 0.0;  // |P_c phi|
  int iterations = 0;
};

struct GroundStateOptions {
  double tol = 1e-10;
  int krylov_dim = 80;
  int max_restarts = 200;
};

GroundStateResult ground_state(const System& sys, const GroundStateOptions& opt = {});

struct EvolveOptions {
  int krylov_dim = 30;
  double min_step = 1e-9;   // relative to |t|
};

// exp(-i t (H - shift)) psi with ||error|| <= tol, certified by the a-posteriori
// Lanczos error estimate with step halving.
Vec evolve(const SpMat& H, const Vec& psi, double t, double tol, double shift = 0.0,
           const EvolveOptions& opt = {});

// A(tau, cloud) Phi_gs = exp(-i tau (H_g - E0)) A_{-tau} Phi_gs.
Vec cloud_state(const System& sys, const GroundStateResult& gs, const fock::PhotonCloud& cloud,
                double tau, double tol);

enum class TauRegime { short_time, long_time, uncovered };
std::string to_string(TauRegime r);
// short: tau <= g^mu, long: tau >= g^{-1/K}, mu = 1 - 1/K.
TauRegime classify_tau(double tau, double g, int K);

struct TransportResult {
  double R = 0.0;
  double t = 0.0;
  std::string region_id;
  double charge = 0.0;
  double tau = 0.0;
  TauRegime tau_regime = TauRegime::short_time;
};

// ||T_T F_R exp(-i t H_g) psi||^2 at one (R, t).
TransportResult transported_charge(const System& sys, const Vec& psi, double R, double t,
                                   const MomentumRegion& region, double tol);

// Charges on an R x t grid with incremental propagation; result[r][i] for R_list[r], t_grid[i].
std::vector<std::vector<double>> charge_table(const System& sys, const Vec& psi,
                                              const std::vector<double>& R_list,
                                              const std::vector<double>& t_grid,
                                              const MomentumRegion& region, double tol);

struct Plateau {
  bool found = false;
  double value = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  int points = 0;
};

// Largest contiguous t-window whose relative variation (max-min)/mean stays below `variation`.
Plateau windowed_plateau(const std::vector<double>& t_grid, const std::vector<double>& charges,
                         double variation = 0.05);

struct PPDecayTable {
  std::vector<double> R;
  std::vector<double> sup_norm;
  int retained_eigenvectors = 0;
  double reference_radius = 0.0;
};

// sup over t of ||F_R exp(-i t H_g) 1_pp psi|| with the finite-model point-spectrum proxy:
// eigenvectors with energy < 0 or ||F_{R0} v|| < 0.1, R0 = half the largest grid radius.
PPDecayTable pp_charge_decay(const System& sys, const Vec& psi, const std::vector<double>& R_list,
                             const std::vector<double>& t_grid, std::size_t max_dense_dim = 4000);

}  // namespace photoion::dynamics
