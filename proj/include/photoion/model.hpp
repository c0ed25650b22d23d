// model.hpp — continuum coupling data, presets, Hypothesis-1 check, discretization
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "photoion/common.hpp"

namespace photoion::model {

// Kernel (p, k) -> amplitude. In d = 1 only the first component of each vector is used.
using Kernel = std::function<cd(const Vec3&, const Vec3&)>;

struct CouplingSpec {
  Kernel rho_hat;                 // rho^(p, k)
  Kernel eta_hat;                 // eta^(p, k)
  std::optional<Kernel> m_kernel; // M(x, k): multiplication operator for the B block
  double e0 = -1.0;
  int smoothness_K = 2;
  double decay_gamma = 2.0;
  int dim = 1;
  bool eta_is_rho = false;
  std::string preset_name;
  std::map<std::string, double> preset_params;

  void validate() const;
};

// "gaussian-toy" params: c, sigma_p, sigma_k, e0, dim, K, gamma.
// "dipole" params: c, R, a, sigma_k, e0, dim, K, gamma.
CouplingSpec preset(const std::string& name, const std::map<std::string, double>& params);

// Polarization used by the dipole preset: unit vector perpendicular to k (d = 3), +x in d = 1.
Vec3 dipole_polarization(const Vec3& k, int dim);

// ---------------------------------------------------------------------------
// Hypothesis 1

struct HypothesisBudget {
  int n_radial = 24;          // Gauss–Legendre nodes in |k|
  double k_max = 8.0;         // radial truncation of the k integral
  int sphere_order = 4;       // angular order (d = 3)
  int electron_points = 64;   // momentum/position samples per axis
  double h_p = 0.25;          // momentum spacing of the sampling grid
  double fd_step = 0.0;       // finite-difference step; 0 selects 1e-3 * k_max
};

struct HypothesisReport {
  double integral_value = 0.0;
  double quadrature_error = 0.0;
  bool passes = false;
};

// J_{K,gamma}(k) at one photon momentum, on the sampling grid of `budget`.
double hypothesis_J(const CouplingSpec& spec, const HypothesisBudget& budget, const Vec3& k);

// Integral of (1 + 1/omega) J^2 over k; passes iff value <= 1 within the quadrature error.
HypothesisReport hypothesis_check(const CouplingSpec& spec, const HypothesisBudget& budget);

// ---------------------------------------------------------------------------
// Discretization

struct ModeGridParams {
  double cutoff_Lambda = 4.0;
  double k_lo = -1.0;  // radial range [k_lo, k_hi]; negative selects 0.05*Lambda / Lambda
  double k_hi = -1.0;
  int n_radial = 4;
  int n_theta = 2;     // d = 3: cells uniform in cos(theta)
  int n_phi = 4;
};

struct ElectronGridParams {
  int points = 64;     // per axis
  double h_x = 0.75;
};

struct GridParams {
  ModeGridParams modes;
  ElectronGridParams electron;
};

struct Mode {
  Vec3 k = Vec3::Zero();
  double omega = 0.0;
  double weight = 0.0;
};

// Electron grid with P continuum points plus the bound level at index P.
// Continuum coefficients live in the momentum basis and carry sqrt(h_p^d).
struct DiscretizedModel {
  int dim = 1;
  std::vector<Mode> modes;
  int points_per_axis = 0;
  double h_x = 0.0;
  double h_p = 0.0;
  std::vector<Vec3> positions;   // P entries, x-fastest ordering
  std::vector<Vec3> momenta;     // P entries, same ordering
  double cutoff_Lambda = 0.0;
  double e0 = 0.0;
  double cell_volume = 0.0;      // momentum-space volume of the union of mode cells
  std::vector<SpMat> coupling;   // G_m, (P+1) x (P+1)

  int P() const { return static_cast<int>(momenta.size()); }
  int electron_dim() const { return P() + 1; }
  int bound_index() const { return P(); }
  int mode_count() const { return static_cast<int>(modes.size()); }
  RVec omegas() const;
  // h_el on the electron space: p^2 on the continuum, e0 on the bound level.
  RVec electron_energies() const;
  // Largest |x| reachable on the position grid.
  double grid_extent() const { return 0.5 * points_per_axis * h_x; }

  void check_invariants() const;
};

// Midpoint mode cells: d = 1 gives {+r, -r} per radial cell, d = 3 an
// n_radial x n_theta x n_phi product. Weights are exact cell volumes.
std::vector<Mode> mode_grid(const ModeGridParams& p, int dim);

DiscretizedModel discretize(const CouplingSpec& spec, const GridParams& grid);
DiscretizedModel discretize(const CouplingSpec& spec, const std::vector<Mode>& modes,
                            double cutoff_Lambda, const ElectronGridParams& electron);

// Unitary DFT between position and momentum coefficient vectors (continuum only).
class ElectronFourier {
 public:
  ElectronFourier(int points_per_axis, double h_x, int dim);
  Vec to_momentum(const Vec& position) const;
  Vec to_position(const Vec& momentum) const;
  // Dense unitary matrix of the full transform (size P^d); only for small grids.
  Mat matrix() const;

 private:
  Vec apply(const Vec& in, bool forward) const;
  int n_;
  int dim_;
  Mat u1_;  // 1-D unitary matrix U_ij = n^{-1/2} exp(-i p_i x_j)
};

nlohmann::json to_json(const DiscretizedModel& m);
DiscretizedModel model_from_json(const nlohmann::json& j);

}  // namespace photoion::model
