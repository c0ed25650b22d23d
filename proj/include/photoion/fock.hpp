// fock.hpp — truncated bosonic Fock space over a finite mode set
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "photoion/common.hpp"

namespace photoion::fock {

using Occupation = std::vector<std::uint8_t>;

class FockBasis {
 public:
  FockBasis(int modes, int max_total);

  int mode_count() const { return modes_; }
  int max_total() const { return max_total_; }
  std::size_t size() const { return states_.size(); }
  const Occupation& state(std::size_t i) const { return states_[i]; }
  const std::vector<Occupation>& states() const { return states_; }
  int total(std::size_t i) const { return totals_[i]; }
  std::optional<std::size_t> index_of(const Occupation& occ) const;

 private:
  int modes_;
  int max_total_;
  std::vector<Occupation> states_;
  std::vector<int> totals_;
  std::map<Occupation, std::size_t> index_;
};

// Memory budget in MB: PHOTOION_MEM_BUDGET_MB if set, else 4096.
double memory_budget_mb();

// Rough working-set estimate for a tensor space of the given dimension.
double estimated_memory_mb(std::size_t basis_size, std::size_t electron_dim);

// Binomial coefficient C(n, k) as a double (exact for the sizes used here).
double binomial(int n, int k);

// Enumerates the basis after checking C(M+N_max, N_max) * electron_dim against the budget.
FockBasis build_basis(int modes, int max_total, std::size_t electron_dim = 1,
                      std::optional<double> budget_mb = std::nullopt);

struct ManyBodyOperator {
  SpMat entries;
  bool hermitian_flag = false;

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
};

enum class LadderKind { create, annihilate };

// a*(f) = sum_m f_m a*_m, a(f) = sum_m conj(f_m) a_m on the photon factor.
// Components that would exceed N_max are dropped, so a(f) is the exact adjoint of a*(f).
ManyBodyOperator ladder(const FockBasis& basis, const Vec& f, LadderKind kind);

// Single-mode creation operator a*_m.
SpMat creation(const FockBasis& basis, int mode);

// Diagonal sum_m n_m omega_m.
ManyBodyOperator field_hamiltonian(const FockBasis& basis, const RVec& omegas);

// Diagonal projector onto states with total occupation in [lo, hi].
SpMat sector_projector(const FockBasis& basis, int lo, int hi);

struct PhotonCloud {
  std::vector<Vec> orbitals;      // coefficient vectors over modes
  std::vector<int> multiplicity;  // n_j >= 1

  int total() const;
  int mode_count() const;
  // Throws ConfigError if the orbitals are not orthonormal within tol.
  void check_orthonormal(double tol = 1e-10) const;
  // Orbitals phi_j -> exp(-i s omega) phi_j (free Heisenberg evolution A -> A_s).
  PhotonCloud phased(const RVec& omegas, double s) const;
};

// Product a*(phi_1)^{n_1} ... a*(phi_m)^{n_m} on the photon factor.
ManyBodyOperator cloud_operator(const FockBasis& basis, const PhotonCloud& cloud);

// Product of creation operators with the exponent of orbital `skip` lowered by one
// (skip < 0 keeps all exponents).
SpMat cloud_product(const FockBasis& basis, const PhotonCloud& cloud, int skip = -1);

// Apply a photon-factor operator to a tensor state (index e * S + s).
Vec apply_photon(const SpMat& op, const Vec& psi);
// Apply an electron-factor operator to a tensor state.
Vec apply_electron(const Mat& op, const Vec& psi, std::size_t photon_dim);
Vec apply_electron(const SpMat& op, const Vec& psi, std::size_t photon_dim);

// kron(electron, photon) with index e * S + s.
SpMat tensor(const SpMat& electron, const SpMat& photon);

SpMat identity(Eigen::Index n);

}  // namespace photoion::fock
