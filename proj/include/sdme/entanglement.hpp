#pragma once

// Disentanglement generator Q^(D), the entanglement variable τ, and the
// thermalisation generator Q^(H) = β(H + β⁻¹ log ρ).

#include "sdme/gellmann.hpp"
#include "sdme/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sdme {

/// η = d_m² / (4(d_m² − 1)); normalises τ to 1 for the maximally entangled
/// pure state of a pair with d_m = min(d_a, d_b).
inline double default_eta(int d_m) {
  if (d_m < 2) throw std::invalid_argument("default_eta: d_m must be >= 2");
  const double d2 = static_cast<double>(d_m) * d_m;
  return d2 / (4.0 * (d2 - 1.0));
}

struct EntanglementConfig {
  SubsystemPair pair;
  double eta = 0.0;  // <= 0 selects default_eta(min(d_first, d_second))

  double resolved_eta(const Dims& dims) const {
    if (eta > 0.0) return eta;
    check_pair(pair, dims);
    return default_eta(std::min(dims[pair.first], dims[pair.second]));
  }
};

struct ThermalConfig {
  double beta = 0.0;
  double log_floor = kDefaultLogFloor;
};

/// C(O_a, O_b) = O_a⊗O_b⊗I − ⟨O_a⊗I⟩⟨I⊗O_b⟩ I on the full space.
inline HermitianOperator c_operator(const HermitianOperator& o_a, const HermitianOperator& o_b,
                                    const DensityMatrix& rho, SubsystemPair pair = {}) {
  const auto& dims = rho.dims();
  check_pair(pair, dims);
  if (o_a.dim() != dims[pair.first] || o_b.dim() != dims[pair.second])
    throw std::invalid_argument("c_operator: operator dimension mismatch");
  CMatrix a = embed(o_a.matrix(), pair.first, dims);
  CMatrix b = embed(o_b.matrix(), pair.second, dims);
  const double shift = expectation(a, rho.matrix()) * expectation(b, rho.matrix());
  CMatrix c = a * b;
  c.diagonal().array() -= shift;
  return HermitianOperator(hermitian_part(c));
}

/// Precomputed generator products for one subsystem pair. Evaluating Q^(D)
/// and τ for a state costs only traces against these cached operators.
class EntanglementGenerator {
 public:
  EntanglementGenerator(Dims dims, EntanglementConfig cfg) : dims_(std::move(dims)), cfg_(cfg) {
    check_pair(cfg_.pair, dims_);
    eta_ = cfg_.resolved_eta(dims_);
    GellMannBasis ga(dims_[cfg_.pair.first]), gb(dims_[cfg_.pair.second]);
    for (const auto& l : ga.generators()) a_.push_back(embed(l, cfg_.pair.first, dims_));
    for (const auto& l : gb.generators()) b_.push_back(embed(l, cfg_.pair.second, dims_));
    ab_.reserve(a_.size() * b_.size());
    for (const auto& a : a_)
      for (const auto& b : b_) ab_.push_back(a * b);
  }

  double eta() const { return eta_; }
  const Dims& dims() const { return dims_; }

  /// ⟨C(λ_a, λ_b)⟩ for a, b >= 1, shape (d_a²−1) × (d_b²−1).
  RMatrix correlations(const CMatrix& rho) const {
    RVector ma(static_cast<Eigen::Index>(a_.size())), mb(static_cast<Eigen::Index>(b_.size()));
    for (std::size_t i = 0; i < a_.size(); ++i) ma(static_cast<Eigen::Index>(i)) = expectation(a_[i], rho);
    for (std::size_t j = 0; j < b_.size(); ++j) mb(static_cast<Eigen::Index>(j)) = expectation(b_[j], rho);
    RMatrix c(ma.size(), mb.size());
    for (Eigen::Index i = 0; i < ma.size(); ++i)
      for (Eigen::Index j = 0; j < mb.size(); ++j)
        c(i, j) = expectation(ab_[static_cast<std::size_t>(i * mb.size() + j)], rho) - ma(i) * mb(j);
    return c;
  }

  double tau(const CMatrix& rho) const { return eta_ * correlations(rho).squaredNorm(); }

  /// Q^(D) = η Σ ⟨C_ab⟩ C_ab. The scalar part of each C_ab is kept so that
  /// ⟨Q^(D)⟩ = τ.
  CMatrix q_operator(const CMatrix& rho) const {
    RVector ma(static_cast<Eigen::Index>(a_.size())), mb(static_cast<Eigen::Index>(b_.size()));
    for (std::size_t i = 0; i < a_.size(); ++i) ma(static_cast<Eigen::Index>(i)) = expectation(a_[i], rho);
    for (std::size_t j = 0; j < b_.size(); ++j) mb(static_cast<Eigen::Index>(j)) = expectation(b_[j], rho);
    const auto n = rho.rows();
    CMatrix q = CMatrix::Zero(n, n);
    double scalar = 0.0;
    for (Eigen::Index i = 0; i < ma.size(); ++i)
      for (Eigen::Index j = 0; j < mb.size(); ++j) {
        const auto& ab = ab_[static_cast<std::size_t>(i * mb.size() + j)];
        const double c = expectation(ab, rho) - ma(i) * mb(j);
        if (c == 0.0) continue;
        q += c * ab;
        scalar += c * ma(i) * mb(j);
      }
    q.diagonal().array() -= scalar;
    return hermitian_part(eta_ * q);
  }

 private:
  Dims dims_;
  EntanglementConfig cfg_;
  double eta_ = 0.0;
  std::vector<CMatrix> a_, b_, ab_;
};

inline HermitianOperator q_disentangle(const DensityMatrix& rho, const EntanglementConfig& cfg) {
  return HermitianOperator(EntanglementGenerator(rho.dims(), cfg).q_operator(rho.matrix()));
}

inline double tau(const DensityMatrix& rho, const EntanglementConfig& cfg = {}) {
  return EntanglementGenerator(rho.dims(), cfg).tau(rho.matrix());
}

/// ρ₀ = e^{−βH} / Tr e^{−βH}.
inline DensityMatrix thermal_state(const HermitianOperator& h, double beta, Dims dims = {}) {
  if (beta < 0.0) throw std::invalid_argument("thermal_state: beta must be >= 0");
  if (dims.empty()) dims = {h.dim()};
  auto eig = hermitian_eigen(h.matrix());
  const double e0 = eig.values.minCoeff();
  RVector w = eig.values.unaryExpr([&](double e) { return std::exp(-beta * (e - e0)); });
  w /= w.sum();
  return DensityMatrix(std::move(dims), hermitian_part(eig.vectors * w.asDiagonal() * eig.vectors.adjoint()));
}

/// Q^(H) = βH + log ρ, with log ρ regularised by the configured floor.
inline HermitianOperator q_thermal(const DensityMatrix& rho, const HermitianOperator& h, const ThermalConfig& cfg) {
  if (cfg.beta < 0.0) throw std::invalid_argument("q_thermal: beta must be >= 0");
  if (h.dim() != rho.dim()) throw std::invalid_argument("q_thermal: dimension mismatch");
  HermitianOperator log_rho = matrix_log_clamped(HermitianOperator(rho.matrix()), cfg.log_floor);
  return HermitianOperator(hermitian_part(cfg.beta * h.matrix() + log_rho.matrix()));
}

/// Von Neumann entropy ⟨−log ρ⟩ using the same eigenvalue floor as Q^(H).
inline double entropy(const CMatrix& rho, double floor = kDefaultLogFloor) {
  auto eig = hermitian_eigen(rho);
  double s = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double p = eig.values(i);
    if (p > 0.0) s -= p * std::log(std::max(p, floor));
  }
  return s;
}

/// ⟨U_H⟩ = ⟨H⟩ − β⁻¹ S(ρ); requires β > 0.
inline double free_energy(const CMatrix& rho, const CMatrix& h, const ThermalConfig& cfg) {
  if (!(cfg.beta > 0.0)) throw std::invalid_argument("free_energy: beta must be > 0");
  return expectation(h, rho) - entropy(rho, cfg.log_floor) / cfg.beta;
}

}  // namespace sdme
