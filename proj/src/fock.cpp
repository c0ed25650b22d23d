// fock.cpp — Fock basis enumeration and photon operators
#include "photoion/fock.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace photoion::fock {

namespace {

// Occupations of `remaining` photons over modes [pos, M) in lexicographically descending order.
void enumerate(int pos, int remaining, Occupation& cur, std::vector<Occupation>& out) {
  const int M = static_cast<int>(cur.size());
  if (pos == M - 1) {
    cur[pos] = static_cast<std::uint8_t>(remaining);
    out.push_back(cur);
    cur[pos] = 0;
    return;
  }
  for (int n = remaining; n >= 0; --n) {
    cur[pos] = static_cast<std::uint8_t>(n);
    enumerate(pos + 1, remaining - n, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

FockBasis::FockBasis(int modes, int max_total) : modes_(modes), max_total_(max_total) {
  if (modes < 1) throw ConfigError("FockBasis: mode count must be >= 1");
  if (max_total < 0 || max_total > 255) throw ConfigError("FockBasis: N_max must be in [0, 255]");
  Occupation cur(modes, 0);
  for (int n = 0; n <= max_total; ++n) {
    const std::size_t before = states_.size();
    enumerate(0, n, cur, states_);
    totals_.insert(totals_.end(), states_.size() - before, n);
  }
  for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
}

std::optional<std::size_t> FockBasis::index_of(const Occupation& occ) const {
  auto it = index_.find(occ);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double memory_budget_mb() {
  if (const char* env = std::getenv("PHOTOION_MEM_BUDGET_MB")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
    throw ConfigError("PHOTOION_MEM_BUDGET_MB must be a positive number");
  }
  return 4096.0;
}

double estimated_memory_mb(std::size_t basis_size, std::size_t electron_dim) {
  // ~64 complex work vectors (Krylov bases, quadrature panels) of the full tensor dimension
  return static_cast<double>(basis_size) * static_cast<double>(electron_dim) * 16.0 * 64.0 / (1024.0 * 1024.0);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

FockBasis build_basis(int modes, int max_total, std::size_t electron_dim, std::optional<double> budget_mb) {
  if (modes < 1) throw ConfigError("build_basis: M must be >= 1");
  if (max_total < 0) throw ConfigError("build_basis: N_max must be >= 0");
  const double count = binomial(modes + max_total, max_total);
  const double budget = budget_mb ? *budget_mb : memory_budget_mb();
  const double need = count * static_cast<double>(electron_dim) * 16.0 * 64.0 / (1024.0 * 1024.0);
  if (need > budget)
    throw BudgetError("build_basis: estimated " + std::to_string(need) + " MB exceeds budget " +
                      std::to_string(budget) + " MB (C(M+N_max,N_max) = " + std::to_string(count) + ")");
  return FockBasis(modes, max_total);
}

SpMat creation(const FockBasis& basis, int mode) {
  if (mode < 0 || mode >= basis.mode_count()) throw ConfigError("creation: mode index out of range");
  const auto S = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::Triplet<cd>> trip;
  Occupation tmp;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis.total(i) >= basis.max_total()) continue;
    tmp = basis.state(i);
    const int n = tmp[mode];
    tmp[mode] = static_cast<std::uint8_t>(n + 1);
    const auto j = basis.index_of(tmp);
    trip.emplace_back(static_cast<Eigen::Index>(*j), static_cast<Eigen::Index>(i), std::sqrt(n + 1.0));
  }
  SpMat a(S, S);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

ManyBodyOperator ladder(const FockBasis& basis, const Vec& f, LadderKind kind) {
  if (f.size() != basis.mode_count()) throw ConfigError("ladder: coefficient vector has wrong length");
  const auto S = static_cast<Eigen::Index>(basis.size());
  SpMat acc(S, S);
  for (int m = 0; m < basis.mode_count(); ++m) {
    if (f[m] == cd(0.0)) continue;
    acc += f[m] * creation(basis, m);
  }
  acc.makeCompressed();
  if (kind == LadderKind::annihilate) {
    SpMat adj = acc.adjoint();
    adj.makeCompressed();
    return {std::move(adj), false};
  }
  return {std::move(acc), false};
}

ManyBodyOperator field_hamiltonian(const FockBasis& basis, const RVec& omegas) {
  if (omegas.size() != basis.mode_count()) throw ConfigError("field_hamiltonian: wrong number of energies");
  for (int m = 0; m < omegas.size(); ++m)
    if (!(omegas[m] > 0.0)) throw ConfigError("field_hamiltonian: photon energies must be positive");
  const auto S = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::Triplet<cd>> trip;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double e = 0.0;
    for (int m = 0; m < basis.mode_count(); ++m) e += basis.state(i)[m] * omegas[m];
    trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), e);
  }
  SpMat h(S, S);
  h.setFromTriplets(trip.begin(), trip.end());
  h.makeCompressed();
  return {std::move(h), true};
}

SpMat sector_projector(const FockBasis& basis, int lo, int hi) {
  const auto S = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::Triplet<cd>> trip;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis.total(i) >= lo && basis.total(i) <= hi)
      trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), 1.0);
  SpMat p(S, S);
  p.setFromTriplets(trip.begin(), trip.end());
  return p;
}

int PhotonCloud::total() const {
  int n = 0;
  for (int k : multiplicity) n += k;
  return n;
}

int PhotonCloud::mode_count() const { return orbitals.empty() ? 0 : static_cast<int>(orbitals.front().size()); }

void PhotonCloud::check_orthonormal(double tol) const {
  if (orbitals.size() != multiplicity.size()) throw ConfigError("PhotonCloud: orbital/multiplicity mismatch");
  if (orbitals.empty()) throw ConfigError("PhotonCloud: no orbitals");
  for (int n : multiplicity)
    if (n < 1) throw ConfigError("PhotonCloud: multiplicities must be >= 1");
  for (std::size_t i = 0; i < orbitals.size(); ++i)
    for (std::size_t j = 0; j < orbitals.size(); ++j) {
      if (orbitals[i].size() != orbitals[j].size()) throw ConfigError("PhotonCloud: orbital lengths differ");
      const cd ip = orbitals[i].dot(orbitals[j]);
      if (std::abs(ip - (i == j ? 1.0 : 0.0)) > tol)
        throw ConfigError("PhotonCloud: orbitals are not orthonormal");
    }
}

PhotonCloud PhotonCloud::phased(const RVec& omegas, double s) const {
  PhotonCloud out = *this;
  for (auto& phi : out.orbitals) {
    if (phi.size() != omegas.size()) throw ConfigError("PhotonCloud: orbital length != mode count");
    for (int m = 0; m < phi.size(); ++m) phi[m] *= std::polar(1.0, -s * omegas[m]);
  }
  return out;
}

SpMat cloud_product(const FockBasis& basis, const PhotonCloud& cloud, int skip) {
  const auto S = static_cast<Eigen::Index>(basis.size());
  SpMat acc = identity(S);
  for (std::size_t j = 0; j < cloud.orbitals.size(); ++j) {
    const int power = cloud.multiplicity[j] - (static_cast<int>(j) == skip ? 1 : 0);
    if (power <= 0) continue;
    const SpMat a = ladder(basis, cloud.orbitals[j], LadderKind::create).entries;
    for (int p = 0; p < power; ++p) acc = SpMat(a * acc);
  }
  acc.makeCompressed();
  return acc;
}

ManyBodyOperator cloud_operator(const FockBasis& basis, const PhotonCloud& cloud) {
  if (cloud.orbitals.size() != cloud.multiplicity.size())
    throw ConfigError("cloud_operator: orbital/multiplicity mismatch");
  if (cloud.total() > basis.max_total()) throw ConfigError("cloud_operator: cloud.N exceeds N_max");
  return {cloud_product(basis, cloud), false};
}

Vec apply_photon(const SpMat& op, const Vec& psi) {
  const Eigen::Index S = op.cols();
  const Eigen::Index E = psi.size() / S;
  Vec out(op.rows() * E);
  Eigen::Map<const Mat> X(psi.data(), S, E);
  Eigen::Map<Mat> Y(out.data(), op.rows(), E);
  Y = op * X;
  return out;
}

Vec apply_electron(const Mat& op, const Vec& psi, std::size_t photon_dim) {
  const auto S = static_cast<Eigen::Index>(photon_dim);
  const Eigen::Index E = psi.size() / S;
  Vec out(S * op.rows());
  Eigen::Map<const Mat> X(psi.data(), S, E);
  Eigen::Map<Mat> Y(out.data(), S, op.rows());
  Y = X * op.transpose();
  return out;
}

Vec apply_electron(const SpMat& op, const Vec& psi, std::size_t photon_dim) {
  const auto S = static_cast<Eigen::Index>(photon_dim);
  const Eigen::Index E = psi.size() / S;
  Vec out(S * op.rows());
  Eigen::Map<const Mat> X(psi.data(), S, E);
  Eigen::Map<Mat> Y(out.data(), S, op.rows());
  const SpMat opt = op.transpose();
  Y = X * opt;
  return out;
}

SpMat tensor(const SpMat& electron, const SpMat& photon) {
  const Eigen::Index S = photon.rows(), Sc = photon.cols();
  std::vector<Eigen::Triplet<cd>> trip;
  trip.reserve(static_cast<std::size_t>(electron.nonZeros() * photon.nonZeros()));
  for (int r = 0; r < electron.outerSize(); ++r)
    for (SpMat::InnerIterator ie(electron, r); ie; ++ie)
      for (int q = 0; q < photon.outerSize(); ++q)
        for (SpMat::InnerIterator ip(photon, q); ip; ++ip)
          trip.emplace_back(ie.row() * S + ip.row(), ie.col() * Sc + ip.col(), ie.value() * ip.value());
  SpMat out(electron.rows() * S, electron.cols() * Sc);
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

SpMat identity(Eigen::Index n) {
  SpMat id(n, n);
  id.setIdentity();
  return id;
}

}  // namespace photoion::fock
