#pragma once

#include "sdme/linalg.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sdme {

/// Generalized Gell-Mann generators of SU(d), normalised so that
/// Tr(λ_i λ_j) = 2 δ_ij.
///
/// Ordering: symmetric off-diagonal (j<k lexicographic), antisymmetric
/// off-diagonal (same order), then diagonal l = 1..d-1. For d = 2 this is
/// (σ_x, σ_y, σ_z).
class GellMannBasis {
 public:
  explicit GellMannBasis(int d) : d_(d) {
    if (d < 2) throw std::invalid_argument("GellMannBasis: dimension must be >= 2");
    gens_.reserve(static_cast<std::size_t>(d * d - 1));
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        CMatrix m = CMatrix::Zero(d, d);
        m(j, k) = m(k, j) = 1.0;
        gens_.push_back(m);
      }
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        CMatrix m = CMatrix::Zero(d, d);
        m(j, k) = cplx(0, -1);
        m(k, j) = cplx(0, 1);
        gens_.push_back(m);
      }
    for (int l = 1; l < d; ++l) {
      CMatrix m = CMatrix::Zero(d, d);
      const double norm = std::sqrt(2.0 / (l * (l + 1.0)));
      for (int j = 0; j < l; ++j) m(j, j) = norm;
      m(l, l) = -l * norm;
      gens_.push_back(m);
    }
  }

  int dim() const { return d_; }
  std::size_t size() const { return gens_.size(); }
  const CMatrix& operator[](std::size_t i) const { return gens_[i]; }
  const std::vector<CMatrix>& generators() const { return gens_; }

 private:
  int d_;
  std::vector<CMatrix> gens_;
};

inline GellMannBasis make_basis(int d) { return GellMannBasis(d); }

/// Induced orthogonal map on generator coefficients under λ -> U λ U†:
/// T_ij = Tr(λ_i U λ_j U†)/2.
inline RMatrix adjoint_representation(const GellMannBasis& basis, const CMatrix& u) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  RMatrix t(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    CMatrix rotated = u * basis[j] * u.adjoint();
    for (Eigen::Index i = 0; i < n; ++i) t(i, j) = 0.5 * trace_product(basis[i], rotated).real();
  }
  return t;
}

/// Real d_a² × d_b² matrix of expectations ⟨G_{a,b}⟩, including the index-0
/// row and column.
struct BlochMatrix {
  RMatrix values;
};

/// Product set G_{a,b} = Γ_a ⊗ Γ_b with Γ_0 = 2^{1/4} d^{-1/2} I and
/// Γ_l = 2^{-1/4} λ_l. All elements satisfy Tr(G G')/2 = δδ'; G_{0,0} is kept
/// at index (0,0) so that ρ = Σ ⟨G_{a,b}⟩ G_{a,b}/2 over all (a,b).
class FactorizedBasis {
 public:
  FactorizedBasis(int d_a, int d_b) : local_a_(local(d_a)), local_b_(local(d_b)), d_a_(d_a), d_b_(d_b) {
    elems_.reserve(local_a_.size() * local_b_.size());
    for (const auto& ga : local_a_)
      for (const auto& gb : local_b_) elems_.push_back(kron(ga, gb));
  }

  int d_a() const { return d_a_; }
  int d_b() const { return d_b_; }
  Eigen::Index rows() const { return static_cast<Eigen::Index>(local_a_.size()); }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(local_b_.size()); }

  const CMatrix& element(Eigen::Index a, Eigen::Index b) const {
    return elems_[static_cast<std::size_t>(a * cols() + b)];
  }
  const CMatrix& gamma_a(Eigen::Index a) const { return local_a_[static_cast<std::size_t>(a)]; }
  const CMatrix& gamma_b(Eigen::Index b) const { return local_b_[static_cast<std::size_t>(b)]; }

  /// Tr(G_{a,b} X) for every (a,b); X need not be a state.
  RMatrix coefficients(const CMatrix& x) const {
    if (x.rows() != d_a_ * d_b_ || x.cols() != d_a_ * d_b_)
      throw std::invalid_argument("FactorizedBasis: dimension mismatch");
    RMatrix out(rows(), cols());
    for (Eigen::Index a = 0; a < rows(); ++a)
      for (Eigen::Index b = 0; b < cols(); ++b) out(a, b) = trace_product(element(a, b), x).real();
    return out;
  }

  CMatrix reconstruct(const BlochMatrix& bm) const {
    if (bm.values.rows() != rows() || bm.values.cols() != cols())
      throw std::invalid_argument("FactorizedBasis: Bloch matrix shape mismatch");
    CMatrix out = CMatrix::Zero(d_a_ * d_b_, d_a_ * d_b_);
    for (Eigen::Index a = 0; a < rows(); ++a)
      for (Eigen::Index b = 0; b < cols(); ++b) out += 0.5 * bm.values(a, b) * element(a, b);
    return out;
  }

 private:
  static std::vector<CMatrix> local(int d) {
    GellMannBasis gm(d);
    std::vector<CMatrix> out;
    out.push_back(std::pow(2.0, 0.25) / std::sqrt(static_cast<double>(d)) * CMatrix::Identity(d, d));
    for (const auto& l : gm.generators()) out.push_back(std::pow(2.0, -0.25) * l);
    return out;
  }

  std::vector<CMatrix> local_a_, local_b_, elems_;
  int d_a_, d_b_;
};

inline BlochMatrix bloch_matrix(const DensityMatrix& rho, const FactorizedBasis& basis) {
  if (rho.dims().size() != 2 || rho.dims()[0] != basis.d_a() || rho.dims()[1] != basis.d_b())
    throw std::invalid_argument("bloch_matrix: state dims do not match the basis");
  return {basis.coefficients(rho.matrix())};
}

/// Result of the rank-1 product-state test.
struct ProductTest {
  bool is_product;
  RVector singular_values;  // descending
};

/// A state is a product state iff its full Bloch matrix has rank one;
/// numerically σ₂/σ₁ < tol.
inline ProductTest is_product(const BlochMatrix& bm, double tol) {
  Eigen::JacobiSVD<RMatrix> svd(bm.values);
  RVector sv = svd.singularValues();
  const bool product = sv.size() < 2 || sv(0) == 0.0 || sv(1) / sv(0) < tol;
  return {product, sv};
}

/// Pair of subsystem indices (order matters for the pair-space layout).
struct SubsystemPair {
  std::size_t first = 0;
  std::size_t second = 1;
};

inline void check_pair(const SubsystemPair& p, const Dims& dims) {
  if (p.first >= dims.size() || p.second >= dims.size() || p.first == p.second)
    throw std::invalid_argument("invalid subsystem pair");
}

/// D = ρ_pair − ρ_first ⊗ ρ_second, on the pair space and embedded in the
/// full space with identity on spectators.
struct CorrelationMatrix {
  HermitianOperator pair_space;
  HermitianOperator full_space;
};

inline CorrelationMatrix correlation_matrix_D(const DensityMatrix& rho, SubsystemPair pair) {
  check_pair(pair, rho.dims());
  const std::size_t both[] = {pair.first, pair.second};
  const std::size_t only_a[] = {pair.first};
  const std::size_t only_b[] = {pair.second};
  CMatrix rho_ab = partial_trace(rho.matrix(), rho.dims(), both);
  CMatrix rho_a = partial_trace(rho.matrix(), rho.dims(), only_a);
  CMatrix rho_b = partial_trace(rho.matrix(), rho.dims(), only_b);
  CMatrix d = hermitian_part(rho_ab - kron(rho_a, rho_b));
  CMatrix full = hermitian_part(embed(d, both, rho.dims()));
  return {HermitianOperator(std::move(d)), HermitianOperator(std::move(full))};
}

}  // namespace sdme
