// leading.hpp — leading-order pairings <L^p, phi>, charge Q and the monochromatic limit
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "photoion/common.hpp"
#include "photoion/model.hpp"
#include "photoion/region.hpp"

namespace photoion::leading {

// Photon orbital as a function of k, with radial support contained in [r_min, r_max].
struct ContinuumOrbital {
  std::function<cd(const Vec3&)> phi;
  double r_min = 0.0;
  double r_max = 0.0;
};

struct ContinuumCloud {
  std::vector<ContinuumOrbital> orbitals;
  std::vector<int> multiplicity;
};

enum class Regime { zero, infinity };
std::string to_string(Regime r);

struct PairingResult {
  Vec3 p = Vec3::Zero();
  cd value = 0.0;
  cd shell_part = 0.0;
  cd pv_part = 0.0;
  Regime regime = Regime::infinity;
};

struct LeadingOptions {
  int sphere_order = 8;       // angular rule for the k-shell (d = 3)
  int p_sphere_order = 6;     // angular rule for the p integral (d = 3)
  double tol = 1e-11;         // absolute tolerance of each radial quadrature
  double pv_extension = 0.1;  // PV domain = support extended by this fraction of its width
};

// Shell function S(r) = integral over directions of rho^(p, r sigma) phi(r sigma)
// (d = 1: sum over sigma = +-1).
cd shell_function(const Vec3& p, double r, const ContinuumOrbital& phi, const model::CouplingSpec& spec,
                  const LeadingOptions& opt = {});

PairingResult pair_L(const Vec3& p, const ContinuumOrbital& phi, const model::CouplingSpec& spec, double E0,
                     Regime regime, const LeadingOptions& opt = {});

// Gram matrix of the cloud orbitals by radial x sphere quadrature over their supports.
Mat cloud_gram(const ContinuumCloud& cloud, int dim, const LeadingOptions& opt = {});

// (prod n_j!) sum_j n_j integral over the region of |<L^p, phi_j>|^2 d^d p.
double charge_Q(const ContinuumCloud& cloud, const MomentumRegion& region, const model::CouplingSpec& spec,
                double E0, Regime regime, const LeadingOptions& opt = {});

// Single-orbital integral of |<L^p, phi>|^2 over the region (no combinatorial factors).
double orbital_charge(const ContinuumOrbital& phi, const MomentumRegion& region, const model::CouplingSpec& spec,
                      double E0, Regime regime, const LeadingOptions& opt = {});

// ---------------------------------------------------------------------------
// Monochromatic limit

enum class MonoCase { below, edge, above };
std::string to_string(MonoCase c);

struct MonochromaticResult {
  double omega = 0.0;
  MonoCase mono_case = MonoCase::below;
  double theta0 = 0.0;
  double I_value = 0.0;
  double limit_charge = 0.0;
};

// Smooth bump on (-1/2, 1/2), L2-normalized.
std::function<double(double)> bump_profile();

// Inner transform F(y) = integral chi(x) / (y - x + i0) dx for chi supported in (-1/2, 1/2).
cd plus_i0_transform(const std::function<double(double)>& chi, double y, double tol = 1e-12);

// I_+ (full line) or I_0 (half line y >= 0) of the profile.
double profile_integral(const std::function<double(double)>& chi, bool half_line, double tol = 1e-10);

// Theta(p, r) = -i integral r^{d-1} omega^{-(d-1)/2} rho^(p, r sigma) kappa(sigma) d sigma.
cd theta_function(const Vec3& p, double r, double omega, const std::function<cd(const Vec3&)>& kappa,
                  const model::CouplingSpec& spec, const LeadingOptions& opt = {});

MonochromaticResult monochromatic(double omega, const std::function<double(double)>& chi,
                                  const std::function<cd(const Vec3&)>& kappa, const MomentumRegion& region,
                                  const model::CouplingSpec& spec, double E0, const LeadingOptions& opt = {});

// phi_delta(k) = N delta^{-1/2} chi((|k| - omega)/delta) kappa(k/|k|) with N fixing the norm exactly.
ContinuumOrbital monochromatic_orbital(double omega, double delta, const std::function<double(double)>& chi,
                                       const std::function<cd(const Vec3&)>& kappa, int dim,
                                       const LeadingOptions& opt = {});

struct DeltaSweepRow {
  double delta = 0.0;
  double charge = 0.0;
};

// Finite-delta charge integral of |<L_0^p, phi_delta>|^2 (regime zero) for each delta.
std::vector<DeltaSweepRow> monochromatic_sweep(double omega, const std::vector<double>& deltas,
                                               const std::function<double(double)>& chi,
                                               const std::function<cd(const Vec3&)>& kappa,
                                               const MomentumRegion& region, const model::CouplingSpec& spec,
                                               double E0, const LeadingOptions& opt = {});

}  // namespace photoion::leading
