#pragma once

// Two spin-1/2 models: the Bell-singlet model with its κ fixed point, and the
// truncation to the {|01⟩, |10⟩} block, which reduces the dynamics to a single
// Bloch vector k = μ n̂.

#include "sdme/entanglement.hpp"
#include "sdme/evolution.hpp"
#include "sdme/linalg.hpp"
#include "sdme/ode.hpp"

#include <boost/math/tools/roots.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace sdme {

// ---------------------------------------------------------------- Bell model

struct BellModelParams {
  double omega_B = 1.0;
  double beta = 10.0;
  double gamma_D = 0.05;
  double gamma_H = 0.005;
  double eta = 1.0 / 3.0;

  void validate() const {
    if (!(omega_B > 0.0)) throw std::invalid_argument("BellModelParams: omega_B must be > 0");
    if (beta < 0.0 || gamma_D < 0.0 || gamma_H < 0.0)
      throw std::invalid_argument("BellModelParams: beta and rates must be >= 0");
    if (!(eta > 0.0)) throw std::invalid_argument("BellModelParams: eta must be > 0");
  }
};

/// |ψ_B⟩ = (|01⟩ − |10⟩)/√2.
inline CVector singlet_ket() {
  CVector psi = CVector::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  return psi;
}

inline CMatrix singlet_projector() {
  CVector psi = singlet_ket();
  return psi * psi.adjoint();
}

/// H = −ω_B P_B.
inline CMatrix bell_hamiltonian(double omega_B) { return -omega_B * singlet_projector(); }

/// Residual of log((1−3κ)/(1+κ)) = βω_B + 4ηγ_Dκ/γ_H; strictly decreasing in κ.
inline double kappa_residual(double kappa, const BellModelParams& p) {
  return std::log((1.0 - 3.0 * kappa) / (1.0 + kappa)) - p.beta * p.omega_B -
         4.0 * p.eta * p.gamma_D * kappa / p.gamma_H;
}

inline constexpr double kKappaLo = -1.0 + 1e-14;
inline constexpr double kKappaHi = 1.0 / 3.0 - 1e-14;

/// With gamma_H = 0 the equation degenerates; allow_limit returns the
/// disentanglement-only fixed point κ = 0 instead of throwing.
inline double solve_kappa(const BellModelParams& p, bool allow_limit = false) {
  p.validate();
  if (p.gamma_H == 0.0) {
    if (allow_limit) return 0.0;
    throw std::invalid_argument("solve_kappa: gamma_H must be > 0");
  }
  auto f = [&p](double k) { return kappa_residual(k, p); };
  const double flo = f(kKappaLo), fhi = f(kKappaHi);
  auto tol = [](double a, double b) { return std::abs(b - a) < 1e-13; };
  if (flo <= 0.0 && fhi < 0.0) {
    // root within 1e-14 of −1 (βω_B ≳ 33): bisect in u = log(1 + κ)
    const double a = 4.0 * p.eta * p.gamma_D / p.gamma_H;
    auto g = [&](double u) {
      const double x = std::exp(u);
      return std::log(4.0 - 3.0 * x) - u - p.beta * p.omega_B - a * (x - 1.0);
    };
    const double u_lo = -(p.beta * p.omega_B + a) - 10.0, u_hi = std::log1p(kKappaLo);
    if (!(g(u_lo) > 0.0 && g(u_hi) <= 0.0)) throw NumericalError("solve_kappa: root not bracketed");
    auto [ua, ub] = boost::math::tools::bisect(g, u_lo, u_hi, tol);
    return -1.0 + std::exp(0.5 * (ua + ub));
  }
  if (!(flo > 0.0 && fhi < 0.0)) throw NumericalError("solve_kappa: root not bracketed");
  auto [a, b] = boost::math::tools::bisect(f, kKappaLo, kKappaHi, tol);
  return 0.5 * (a + b);
}

/// Asymptotic forms of κ. The `printed` variants omit η in the rate ratio;
/// the others follow from linearising the κ equation itself.
namespace kappa_limits {

inline double thermal_printed(const BellModelParams& p) {
  return -1.0 + 4.0 * std::exp(-p.beta * p.omega_B + 4.0 * p.gamma_D / p.gamma_H);
}
inline double thermal(const BellModelParams& p) {
  return -1.0 + 4.0 * std::exp(-p.beta * p.omega_B + 4.0 * p.eta * p.gamma_D / p.gamma_H);
}
inline double disentangle_printed(const BellModelParams& p) {
  return -0.25 * p.beta * p.omega_B / (1.0 + p.gamma_D / p.gamma_H);
}
inline double disentangle(const BellModelParams& p) {
  return -0.25 * p.beta * p.omega_B / (1.0 + p.eta * p.gamma_D / p.gamma_H);
}

}  // namespace kappa_limits

/// ρ_s = (1 + κ(1 − 4P_B))/4.
inline DensityMatrix bell_state_from_kappa(double kappa) {
  if (kappa < -1.0 || kappa > 1.0 / 3.0) throw std::invalid_argument("bell_state_from_kappa: kappa outside [-1, 1/3]");
  CMatrix m = 0.25 * (CMatrix::Identity(4, 4) + kappa * (CMatrix::Identity(4, 4) - 4.0 * singlet_projector()));
  return DensityMatrix({2, 2}, hermitian_part(m));
}

inline DensityMatrix bell_fixed_point(const BellModelParams& p, bool allow_limit = false) {
  return bell_state_from_kappa(solve_kappa(p, allow_limit));
}

inline MasterEquation bell_equation(const BellModelParams& p) {
  p.validate();
  ThetaSpec th;
  th.gamma_D = p.gamma_D;
  th.gamma_H = p.gamma_H;
  th.pairs = {EntanglementConfig{.pair = {}, .eta = p.eta}};
  th.thermal.beta = p.beta;
  return MasterEquation({2, 2}, bell_hamiltonian(p.omega_B), th);
}

// ------------------------------------------------------ truncation approximation

using Vec3 = Eigen::Vector3d;

inline constexpr double kMuMax = 1.0 - 1e-12;

struct TruncationParams {
  Vec3 omega_E{100.0, 100.0, 100.0};
  double omega_s = 0.0;  // <= 0: 50/β
  double beta = 1.0 / (100.0 * std::sqrt(3.0));
  double gamma_D = 1.0;
  double gamma_H = 1.0;

  double resolved_omega_s() const { return omega_s > 0.0 ? omega_s : 50.0 / beta; }
  /// Bookkeeping only: the truncation assumes ω_sβ ≫ 1.
  bool truncation_valid() const { return beta > 0.0 && resolved_omega_s() * beta >= 10.0; }

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("TruncationParams: beta must be > 0");
    if (gamma_D < 0.0 || gamma_H < 0.0) throw std::invalid_argument("TruncationParams: rates must be >= 0");
  }
};

namespace detail {

struct Polar {
  double mu;
  Vec3 n;  // zero when mu = 0
};

inline Polar polar(const Vec3& k) {
  const double mu = k.norm();
  return {mu, mu > 0.0 ? Vec3(k / mu) : Vec3::Zero()};
}

inline double clamped_atanh(double mu) { return std::atanh(std::min(mu, kMuMax)); }

}  // namespace detail

/// Disentanglement term k^(D).
inline Vec3 k_disentangle(const Vec3& k, double gamma_D) {
  const auto [mu, n] = detail::polar(k);
  const double np2 = mu * mu * (1.0 - n.z() * n.z());
  return -(2.0 / 3.0) * gamma_D * mu * Vec3(n.x() * (np2 - 1.0), n.y() * (np2 - 1.0), n.z() * np2);
}

/// Thermalisation term k^(H).
inline Vec3 k_thermal(const Vec3& k, const TruncationParams& p) {
  const auto [mu, n] = detail::polar(k);
  const double radial = 2.0 * (1.0 - mu * mu) * detail::clamped_atanh(mu) - p.beta * mu * mu * p.omega_E.dot(n);
  return p.gamma_H * (0.5 * p.beta * p.omega_E + 0.5 * radial * n);
}

/// No range check; stage points of an explicit integrator may sit just
/// outside the unit ball.
inline Vec3 trunc_rhs_unchecked(const Vec3& k, const TruncationParams& p) {
  return p.omega_E.cross(k) - 2.0 * (k_thermal(k, p) + k_disentangle(k, p.gamma_D));
}

inline Vec3 trunc_rhs(const Vec3& k, const TruncationParams& p) {
  if (k.norm() > 1.0 + 1e-10) throw std::invalid_argument("trunc_rhs: |k| > 1");
  return trunc_rhs_unchecked(k, p);
}

struct TruncObservables {
  double q_D;
  double q_H;
  double entropy;
  double purity;
};

inline TruncObservables trunc_observables(const Vec3& k, const TruncationParams& p) {
  const auto [mu, n] = detail::polar(k);
  if (mu > 1.0 + 1e-10) throw std::invalid_argument("trunc_observables: |k| > 1");
  auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
  const double nz2 = n.z() * n.z();
  TruncObservables o;
  o.q_D = (1.0 + 2.0 * mu * mu + mu * mu * nz2 * (mu * mu * nz2 - 4.0)) / 3.0;
  o.entropy = -(xlogx(0.5 * (1.0 - mu)) + xlogx(0.5 * (1.0 + mu)));
  o.q_H = 0.5 * mu * p.beta * p.omega_E.dot(n) - o.entropy;
  o.purity = 0.5 * (1.0 + mu * mu);
  return o;
}

/// −tanh(βω_E/2) ω̂_E.
inline Vec3 thermal_bloch(const TruncationParams& p) {
  const double w = p.omega_E.norm();
  if (w == 0.0) return Vec3::Zero();
  return -std::tanh(0.5 * p.beta * w) * p.omega_E / w;
}

// Central block basis: |01⟩ (index 1) and |10⟩ (index 2), with σ_z = +1 on |01⟩.

inline DensityMatrix truncated_density(const Vec3& k) {
  if (k.norm() > 1.0 + 1e-10) throw std::invalid_argument("truncated_density: |k| > 1");
  CMatrix rho = CMatrix::Zero(4, 4);
  CMatrix c = pauli::bloch_state(k);
  rho.block(1, 1, 2, 2) = c;
  return DensityMatrix({2, 2}, rho);
}

inline Vec3 truncated_bloch(const CMatrix& rho) {
  const cplx r12 = rho(1, 2);
  return Vec3(2.0 * r12.real(), -2.0 * r12.imag(), (rho(1, 1) - rho(2, 2)).real());
}

/// Central block ω_E·σ/2; the outer levels |00⟩, |11⟩ sit at ω_s/2.
inline CMatrix trunc_hamiltonian(const TruncationParams& p) {
  CMatrix h = CMatrix::Zero(4, 4);
  const double ws = p.resolved_omega_s();
  h(0, 0) = h(3, 3) = 0.5 * ws;
  h.block(1, 1, 2, 2) = 0.5 * (p.omega_E.x() * pauli::x() + p.omega_E.y() * pauli::y() + p.omega_E.z() * pauli::z());
  return h;
}

inline MasterEquation trunc_equation(const TruncationParams& p) {
  p.validate();
  ThetaSpec th;
  th.gamma_D = p.gamma_D;
  th.gamma_H = p.gamma_H;
  th.thermal.beta = p.beta;
  return MasterEquation({2, 2}, trunc_hamiltonian(p), th);
}

struct TruncTrajectory {
  std::vector<double> t;
  std::vector<Vec3> k;
  double max_norm = 0.0;
};

inline TruncTrajectory integrate_trunc(const Vec3& k0, const TruncationParams& p, double t_end, double dt_out,
                                       ode::AdaptiveOptions opt = {.atol = 1e-12, .rtol = 1e-10}) {
  p.validate();
  if (k0.norm() > 1.0 + 1e-10) throw std::invalid_argument("integrate_trunc: |k0| > 1");
  TruncTrajectory tr;
  auto f = [&p](double, const Vec3& k) -> Vec3 { return trunc_rhs_unchecked(k, p); };
  auto observe = [&tr](double t, const Vec3& k) {
    tr.t.push_back(t);
    tr.k.push_back(k);
  };
  auto check = [&tr](double t, Vec3& k) {
    tr.max_norm = std::max(tr.max_norm, k.norm());
    if (!std::isfinite(k.norm()) || k.norm() > 1.0 + 1e-6)
      throw NumericalError("integrate_trunc: |k| left the unit ball at t = " + csv::format(t));
  };
  ode::integrate_adaptive(f, k0, 0.0, t_end, dt_out, opt, observe, check);
  return tr;
}

/// Settles by integration, then polishes with Newton on trunc_rhs.
inline Vec3 trunc_steady_state(const TruncationParams& p, const Vec3& k0, double t_settle) {
  Vec3 k = integrate_trunc(k0, p, t_settle, t_settle).k.back();
  for (int it = 0; it < 50; ++it) {
    const Vec3 r = trunc_rhs_unchecked(k, p);
    if (r.norm() < 1e-14) break;
    Eigen::Matrix3d j;
    for (int c = 0; c < 3; ++c) {
      const double h = 1e-7 * std::max(1.0, std::abs(k(c)));
      Vec3 kp = k, km = k;
      kp(c) += h;
      km(c) -= h;
      j.col(c) = (trunc_rhs_unchecked(kp, p) - trunc_rhs_unchecked(km, p)) / (2.0 * h);
    }
    const Vec3 dk = j.fullPivLu().solve(r);
    k -= dk;
    if (dk.norm() < 1e-15) break;
  }
  return k;
}

struct TruncOracleResult {
  double max_deviation = 0.0;
  Vec3 k_reduced;
  Vec3 k_full;
};

/// Integrates the reduced 3D equation and the full 4×4 master equation from
/// the same state and reports the largest |k_reduced − k_full| over samples.
inline TruncOracleResult trunc_vs_full_oracle(const Vec3& k0, const TruncationParams& p, double t_end,
                                              std::size_t samples = 400) {
  const double dt = t_end / static_cast<double>(samples);
  auto reduced = integrate_trunc(k0, p, t_end, dt);

  IntegrationControls ctl;
  ctl.adaptive = {.atol = 1e-12, .rtol = 1e-10};
  ctl.sample_interval = dt;
  ctl.store_state_every = 1;
  auto full = integrate(truncated_density(k0), trunc_equation(p), t_end, ctl);

  if (full.states.size() != reduced.k.size()) throw std::logic_error("trunc_vs_full_oracle: sample mismatch");
  TruncOracleResult res;
  for (std::size_t i = 0; i < full.states.size(); ++i)
    res.max_deviation = std::max(res.max_deviation, (truncated_bloch(full.states[i]) - reduced.k[i]).norm());
  res.k_reduced = reduced.k.back();
  res.k_full = truncated_bloch(full.final_state);
  return res;
}

}  // namespace sdme
