#pragma once

// Reduced dynamics of the Schmidt coefficients of a bipartite pure state under
// pure disentanglement:  dq_l/dt = c γη q_l K_l^(m),  K_l^(m) = q_l^{2(m−1)} − L_{2m}.

#include "sdme/csv.hpp"
#include "sdme/linalg.hpp"
#include "sdme/ode.hpp"
#include "sdme/random.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdme {

inline constexpr double kSchmidtNormTol = 1e-10;

class SchmidtState {
 public:
  explicit SchmidtState(RVector q) : q_(std::move(q)) {
    if (q_.size() < 1) throw std::invalid_argument("SchmidtState: empty coefficient vector");
    if ((q_.array() < 0.0).any()) throw std::invalid_argument("SchmidtState: coefficients must be >= 0");
    if (std::abs(q_.squaredNorm() - 1.0) > kSchmidtNormTol)
      throw std::invalid_argument("SchmidtState: sum of q_l^2 must be 1");
  }

  static SchmidtState uniform(int d_m) {
    if (d_m < 1) throw std::invalid_argument("SchmidtState: d_m must be >= 1");
    return SchmidtState(RVector::Constant(d_m, 1.0 / std::sqrt(static_cast<double>(d_m))));
  }

  /// q_l ∝ u_l with u_l uniform on (0, 1), normalised.
  static SchmidtState random(Rng& rng, int d_m) {
    if (d_m < 1) throw std::invalid_argument("SchmidtState: d_m must be >= 1");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RVector q(d_m);
    for (int l = 0; l < d_m; ++l) q(l) = u(rng);
    return SchmidtState(q / q.norm());
  }

  const RVector& q() const { return q_; }
  int d_m() const { return static_cast<int>(q_.size()); }

 private:
  RVector q_;
};

struct SchmidtModel {
  double gamma_eta = 1.0;  // γ_D η
  int m = 3;
  std::optional<double> rate_factor;  // overrides c

  void validate() const {
    if (!(gamma_eta > 0.0)) throw std::invalid_argument("SchmidtModel: gamma_eta must be > 0");
    if (m != 2 && m != 3) throw std::invalid_argument("SchmidtModel: m must be 2 or 3");
    if (rate_factor && !(*rate_factor > 0.0)) throw std::invalid_argument("SchmidtModel: rate_factor must be > 0");
  }

  /// 4, or 12 when d_m = 2, unless overridden.
  double factor(int d_m) const {
    if (rate_factor) return *rate_factor;
    return d_m == 2 ? 12.0 : 4.0;
  }
};

/// L_n = Σ q_l^n. Works on any coefficient vector.
inline double moments(const RVector& q, int n) {
  if (n < 1) throw std::invalid_argument("moments: n must be >= 1");
  return q.array().pow(static_cast<double>(n)).sum();
}
inline double moments(const SchmidtState& s, int n) { return moments(s.q(), n); }

inline double capitalistic(const RVector& q, Eigen::Index l, int m) {
  if (l < 0 || l >= q.size()) throw std::out_of_range("capitalistic: index out of range");
  return std::pow(q(l), 2 * (m - 1)) - moments(q, 2 * m);
}
inline double capitalistic(const SchmidtState& s, Eigen::Index l, int m) { return capitalistic(s.q(), l, m); }

inline RVector schmidt_rhs(const RVector& q, const SchmidtModel& model) {
  const double l2m = moments(q, 2 * model.m);
  const double c = model.factor(static_cast<int>(q.size())) * model.gamma_eta;
  RVector out(q.size());
  for (Eigen::Index l = 0; l < q.size(); ++l) out(l) = c * q(l) * (std::pow(q(l), 2 * (model.m - 1)) - l2m);
  return out;
}
inline RVector schmidt_rhs(const SchmidtState& s, const SchmidtModel& model) { return schmidt_rhs(s.q(), model); }

/// H^(m) = (1 + m(1 − L₂)) L_{2m} / (2m); defined off the unit sphere too.
inline double potential(const RVector& q, int m) {
  return (1.0 + m * (1.0 - moments(q, 2))) * moments(q, 2 * m) / (2.0 * m);
}
inline double potential(const SchmidtState& s, int m) { return potential(s.q(), m); }

/// ∂H^(m)/∂q_l = −q_l L_{2m} + (1 + m(1 − L₂)) q_l^{2m−1}; equals q_l K_l^(m) on L₂ = 1.
inline RVector potential_gradient(const RVector& q, int m) {
  const double l2m = moments(q, 2 * m);
  const double pre = 1.0 + m * (1.0 - moments(q, 2));
  RVector g(q.size());
  for (Eigen::Index l = 0; l < q.size(); ++l) g(l) = -q(l) * l2m + pre * std::pow(q(l), 2 * m - 1);
  return g;
}

struct SchmidtControls {
  ode::AdaptiveOptions adaptive{.atol = 1e-12, .rtol = 1e-10};
  double sample_interval = 0.0;  // 0: 200 samples
  double norm_tol = 1e-8;        // abort when |L₂ − 1| exceeds this
  bool renormalize = false;
};

struct SchmidtTrajectory {
  csv::Table table;  // t, q1..q_dm
  Eigen::Index initial_max = 0;
  double max_norm_error = 0.0;
  RVector final_q;
  ode::Stats stats;
};

inline SchmidtTrajectory integrate_schmidt(const SchmidtState& s0, const SchmidtModel& model, double t_end,
                                           const SchmidtControls& ctl = {}) {
  model.validate();
  if (!(t_end > 0.0)) throw std::invalid_argument("integrate_schmidt: t_end must be positive");
  SchmidtTrajectory tr;
  tr.table.columns.push_back("t");
  for (int l = 1; l <= s0.d_m(); ++l) tr.table.columns.push_back("q" + std::to_string(l));
  s0.q().maxCoeff(&tr.initial_max);

  auto f = [&model](double, const RVector& q) -> RVector { return schmidt_rhs(q, model); };
  auto observe = [&tr](double t, const RVector& q) {
    std::vector<double> row{t};
    row.insert(row.end(), q.data(), q.data() + q.size());
    tr.table.rows.push_back(std::move(row));
  };
  auto check = [&](double t, RVector& q) {
    const double err = std::abs(q.squaredNorm() - 1.0);
    tr.max_norm_error = std::max(tr.max_norm_error, err);
    if (!(err <= ctl.norm_tol))
      throw NumericalError("integrate_schmidt: |L2 - 1| = " + csv::format(err) + " at t = " + csv::format(t));
    if (ctl.renormalize) {
      q /= q.norm();
      return true;
    }
    return false;
  };
  const double dt_out = ctl.sample_interval > 0.0 ? ctl.sample_interval : t_end / 200.0;
  tr.final_q = ode::integrate_adaptive(f, s0.q(), 0.0, t_end, dt_out, ctl.adaptive, observe, check, &tr.stats);
  return tr;
}

/// Pure state Σ q_l |l⟩⊗|l⟩ on C^{d_a} ⊗ C^{d_b}.
inline DensityMatrix schmidt_density(const RVector& q, int d_a, int d_b) {
  if (q.size() > std::min(d_a, d_b)) throw std::invalid_argument("schmidt_density: too many coefficients");
  CVector psi = CVector::Zero(d_a * d_b);
  for (Eigen::Index l = 0; l < q.size(); ++l) psi(l * d_b + l) = q(l);
  return DensityMatrix::from_ket({d_a, d_b}, psi);
}

/// Schmidt coefficients of a (near) pure bipartite state, descending: singular
/// values of the leading eigenvector reshaped to d_a x d_b. Square roots of the
/// eigenvalues of ρ_a would turn an O(ε) impurity into O(√ε) in the small q_l.
inline RVector schmidt_coefficients(const CMatrix& rho, int d_a, int d_b) {
  if (rho.rows() != d_a * d_b) throw std::invalid_argument("schmidt_coefficients: dimension mismatch");
  auto eig = hermitian_eigen(hermitian_part(rho));
  Eigen::Index top = 0;
  eig.values.maxCoeff(&top);
  const CVector psi = eig.vectors.col(top);
  const CMatrix m = Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(psi.data(), d_a, d_b);
  return Eigen::JacobiSVD<CMatrix>(m).singularValues();
}

}  // namespace sdme
