#pragma once

// Seeded random states and unitaries. All draws go through std::mt19937_64 so a
// seed fixes the result within one build.

#include "sdme/linalg.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>

namespace sdme {

using Rng = std::mt19937_64;
inline constexpr const char* kRngName = "mt19937_64";

inline CMatrix ginibre(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = cplx(n(rng), n(rng));
  return g;
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal pushed into Q.
inline CMatrix random_unitary(Rng& rng, int d) {
  if (d < 1) throw std::invalid_argument("random_unitary: d must be >= 1");
  Eigen::HouseholderQR<CMatrix> qr(ginibre(rng, d, d));
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix& r = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

inline CMatrix random_hermitian(Rng& rng, int d) {
  CMatrix g = ginibre(rng, d, d);
  return 0.5 * (g + g.adjoint());
}

inline DensityMatrix random_pure(Rng& rng, const Dims& dims) {
  CVector psi = ginibre(rng, total_dim(dims), 1).col(0);
  return DensityMatrix::from_ket(dims, psi);
}

/// ρ = GG†/Tr(GG†) with G of shape n × rank; rank 0 means full rank.
inline DensityMatrix random_mixed(Rng& rng, const Dims& dims, int rank = 0) {
  const int n = total_dim(dims);
  if (rank <= 0) rank = n;
  if (rank > n) throw std::invalid_argument("random_mixed: rank exceeds the dimension");
  CMatrix g = ginibre(rng, n, rank);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(dims, hermitian_part(rho));
}

}  // namespace sdme
