#pragma once

// Dense complex linear algebra for small Hermitian operators: Kronecker
// products, subsystem embedding, partial traces and spectral functions.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sdme {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Ordered subsystem dimensions (d_a, d_b[, d_c, ...]).
using Dims = std::vector<int>;

/// Thrown when an integration or a numerical invariant check fails.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityTol = 1e-10;
inline constexpr double kDefaultLogFloor = 1e-12;

inline int total_dim(std::span<const int> dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

inline double hermiticity_error(const CMatrix& a) { return (a - a.adjoint()).cwiseAbs().maxCoeff(); }

inline CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

/// Tr(A B) without forming the product.
inline cplx trace_product(const CMatrix& a, const CMatrix& b) {
  return (a.transpose().array() * b.array()).sum();
}

/// Re Tr(O rho); exact expectation for Hermitian O and rho.
inline double expectation(const CMatrix& op, const CMatrix& rho) { return trace_product(op, rho).real(); }

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CMatrix kron(std::span<const CMatrix> factors) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

/// Hermitian operator with the Hermiticity invariant checked at construction.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(CMatrix m, double tol = kHermitianTol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
      throw std::invalid_argument("HermitianOperator: matrix must be square and nonempty");
    const double err = hermiticity_error(m_);
    if (err > tol) throw std::invalid_argument("HermitianOperator: not Hermitian (error " + std::to_string(err) + ")");
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  operator const CMatrix&() const { return m_; }

 private:
  CMatrix m_;
};

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
struct HermitianEigen {
  RVector values;
  CMatrix vectors;

  CMatrix reconstruct() const { return vectors * values.asDiagonal() * vectors.adjoint(); }
};

inline HermitianEigen hermitian_eigen(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(a));
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian_eigen: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// f(A) = U f(Λ) U† for Hermitian A.
template <class F>
CMatrix spectral_apply(const CMatrix& a, F&& f) {
  auto eig = hermitian_eigen(a);
  RVector fv = eig.values.unaryExpr(std::forward<F>(f));
  return eig.vectors * fv.asDiagonal() * eig.vectors.adjoint();
}

inline CMatrix expm_hermitian(const CMatrix& a) {
  return spectral_apply(a, [](double x) { return std::exp(x); });
}

/// exp(-i H t) for Hermitian H.
inline CMatrix propagator(const CMatrix& h, double t) {
  auto eig = hermitian_eigen(h);
  CVector phases = (eig.values * (-t)).unaryExpr([](double x) { return std::polar(1.0, x); });
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

/// Logarithm of a PSD matrix with eigenvalues below `floor` raised to `floor`.
inline HermitianOperator matrix_log_clamped(const HermitianOperator& a, double floor = kDefaultLogFloor) {
  if (!(floor > 0.0)) throw std::invalid_argument("matrix_log_clamped: floor must be positive");
  auto eig = hermitian_eigen(a.matrix());
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  if (eig.values.minCoeff() < -1e-10 * scale)
    throw std::invalid_argument("matrix_log_clamped: matrix is not positive semidefinite");
  RVector logs = eig.values.unaryExpr([floor](double x) { return std::log(std::max(x, floor)); });
  return HermitianOperator(hermitian_part(eig.vectors * logs.asDiagonal() * eig.vectors.adjoint()));
}

// Unchecked variant used on integrator hot paths, where positivity is
// monitored separately.
inline CMatrix log_clamped(const CMatrix& a, double floor) {
  return hermitian_part(spectral_apply(a, [floor](double x) { return std::log(std::max(x, floor)); }));
}

namespace detail {

inline std::vector<int> strides(std::span<const int> dims) {
  std::vector<int> s(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * dims[k + 1];
  return s;
}

inline void check_sites(std::span<const std::size_t> sites, std::span<const int> dims) {
  if (sites.empty()) throw std::invalid_argument("subsystem selection must be nonempty");
  std::vector<bool> seen(dims.size(), false);
  for (auto s : sites) {
    if (s >= dims.size()) throw std::invalid_argument("unknown subsystem index " + std::to_string(s));
    if (seen[s]) throw std::invalid_argument("subsystem selected twice");
    seen[s] = true;
  }
}

}  // namespace detail

/// Subsystem index for a label 'a', 'b', 'c', ...
inline std::size_t subsystem_index(char label, std::size_t n_subsystems) {
  if (label < 'a' || static_cast<std::size_t>(label - 'a') >= n_subsystems)
    throw std::invalid_argument(std::string("unknown subsystem label '") + label + "'");
  return static_cast<std::size_t>(label - 'a');
}

inline std::vector<std::size_t> subsystem_indices(std::string_view labels, std::size_t n_subsystems) {
  std::vector<std::size_t> out;
  for (char c : labels) out.push_back(subsystem_index(c, n_subsystems));
  return out;
}

/// Places `op`, acting on the subsystems `sites` (in that order), into the
/// full space with identity on every other subsystem.
inline CMatrix embed(const CMatrix& op, std::span<const std::size_t> sites, std::span<const int> dims) {
  detail::check_sites(sites, dims);
  int d_sub = 1;
  for (auto s : sites) d_sub *= dims[s];
  if (op.rows() != d_sub || op.cols() != d_sub) throw std::invalid_argument("embed: operator dimension mismatch");

  const int n = total_dim(dims);
  const auto st = detail::strides(dims);
  std::vector<bool> is_site(dims.size(), false);
  for (auto s : sites) is_site[s] = true;

  // Sub-space index of every full index, and the spectator part of it.
  std::vector<int> sub_idx(n), rest_idx(n);
  for (int i = 0; i < n; ++i) {
    int sub = 0, rest = 0;
    for (auto s : sites) sub = sub * dims[s] + (i / st[s]) % dims[s];
    for (std::size_t k = 0; k < dims.size(); ++k)
      if (!is_site[k]) rest = rest * dims[k] + (i / st[k]) % dims[k];
    sub_idx[i] = sub;
    rest_idx[i] = rest;
  }
  CMatrix out = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (rest_idx[i] == rest_idx[j]) out(i, j) = op(sub_idx[i], sub_idx[j]);
  return out;
}

inline CMatrix embed(const CMatrix& op, std::size_t site, std::span<const int> dims) {
  const std::size_t s[] = {site};
  return embed(op, s, dims);
}

/// Trace over every subsystem not in `keep`; the result is ordered as `keep`.
inline CMatrix partial_trace(const CMatrix& rho, std::span<const int> dims, std::span<const std::size_t> keep) {
  detail::check_sites(keep, dims);
  const int n = total_dim(dims);
  if (rho.rows() != n || rho.cols() != n) throw std::invalid_argument("partial_trace: dimension mismatch");
  const auto st = detail::strides(dims);
  std::vector<bool> kept(dims.size(), false);
  for (auto s : keep) kept[s] = true;

  int d_keep = 1;
  for (auto s : keep) d_keep *= dims[s];
  std::vector<int> sub_idx(n), rest_idx(n);
  for (int i = 0; i < n; ++i) {
    int sub = 0, rest = 0;
    for (auto s : keep) sub = sub * dims[s] + (i / st[s]) % dims[s];
    for (std::size_t k = 0; k < dims.size(); ++k)
      if (!kept[k]) rest = rest * dims[k] + (i / st[k]) % dims[k];
    sub_idx[i] = sub;
    rest_idx[i] = rest;
  }
  CMatrix out = CMatrix::Zero(d_keep, d_keep);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (rest_idx[i] == rest_idx[j]) out(sub_idx[i], sub_idx[j]) += rho(i, j);
  return out;
}

/// Density operator on a factorized Hilbert space.
///
/// Invariants (checked at construction): Hermitian within 1e-12, unit trace
/// within 1e-10 and smallest eigenvalue >= -1e-10.
class DensityMatrix {
 public:
  DensityMatrix(Dims dims, CMatrix m) : dims_(std::move(dims)), m_(std::move(m)) {
    if (dims_.empty() || std::any_of(dims_.begin(), dims_.end(), [](int d) { return d < 1; }))
      throw std::invalid_argument("DensityMatrix: invalid subsystem dimensions");
    const int n = total_dim(dims_);
    if (m_.rows() != n || m_.cols() != n) throw std::invalid_argument("DensityMatrix: dimension mismatch");
    if (hermiticity_error(m_) > kHermitianTol) throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(m_.trace() - 1.0) > kTraceTol) throw std::invalid_argument("DensityMatrix: trace is not one");
    if (hermitian_eigen(m_).values.minCoeff() < -kPositivityTol)
      throw std::invalid_argument("DensityMatrix: not positive semidefinite");
  }

  static DensityMatrix from_ket(Dims dims, const CVector& psi) {
    CVector v = psi / psi.norm();
    return DensityMatrix(std::move(dims), v * v.adjoint());
  }

  static DensityMatrix maximally_mixed(Dims dims) {
    const int n = total_dim(dims);
    return DensityMatrix(std::move(dims), CMatrix::Identity(n, n) / static_cast<double>(n));
  }

  /// ρ_1 ⊗ ρ_2 ⊗ ... with the factors' dims concatenated.
  static DensityMatrix product(std::span<const DensityMatrix> factors) {
    Dims dims;
    CMatrix m = CMatrix::Identity(1, 1);
    for (const auto& f : factors) {
      dims.insert(dims.end(), f.dims().begin(), f.dims().end());
      m = kron(m, f.matrix());
    }
    return DensityMatrix(std::move(dims), std::move(m));
  }

  const Dims& dims() const { return dims_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  operator const CMatrix&() const { return m_; }

  double purity() const { return trace_product(m_, m_).real(); }

 private:
  Dims dims_;
  CMatrix m_;
};

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  Dims kept;
  for (auto s : keep) {
    if (s >= rho.dims().size()) throw std::invalid_argument("unknown subsystem index " + std::to_string(s));
    kept.push_back(rho.dims()[s]);
  }
  return DensityMatrix(kept, hermitian_part(partial_trace(rho.matrix(), rho.dims(), keep)));
}

/// Label form, e.g. partial_trace(rho, "a") or partial_trace(rho, "ca").
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::string_view keep_labels) {
  return partial_trace(rho, subsystem_indices(keep_labels, rho.dims().size()));
}

namespace pauli {

inline CMatrix identity() { return CMatrix::Identity(2, 2); }
inline CMatrix x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline CMatrix y() {
  CMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
inline CMatrix z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// (1 + k·σ)/2.
inline CMatrix bloch_state(const Eigen::Vector3d& k) { return 0.5 * (identity() + k.x() * x() + k.y() * y() + k.z() * z()); }

}  // namespace pauli

}  // namespace sdme
