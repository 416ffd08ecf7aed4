#pragma once

// Mean-field Bloch equations for a spin a coupled through g S_ax S_bz-type
// dipolar coupling to a driven spin b, in the frame rotating with the drive.
// Bloch vectors are k = ⟨σ⟩, so |k| <= 1 and k_z0 = −1/(2n̂₀+1).

#include "sdme/csv.hpp"
#include "sdme/evolution.hpp"
#include "sdme/lindblad.hpp"
#include "sdme/linalg.hpp"
#include "sdme/ode.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdme {

using MfaVector = Eigen::Matrix<double, 6, 1>;  // (k_a, k_b)

struct MfaParams {
  double omega_a = 1.0;
  double Delta = 0.0;  // ω_p − ω_b; positive is blue detuned
  double omega_1 = 0.0;
  double g = 0.0;
  double T1a = 1.0, T2a = 1.0, T1b = 1.0, T2b = 1.0;  // may be +inf
  double kz0a = -1.0, kz0b = -1.0;

  double omega_R() const { return std::hypot(omega_1, Delta); }
  bool hartmann_hahn(double tol = 1e-9) const { return std::abs(omega_a - omega_R()) < tol * omega_a; }

  void validate() const {
    if (!(omega_a > 0.0)) throw std::invalid_argument("MfaParams: omega_a must be > 0");
    if (omega_1 < 0.0) throw std::invalid_argument("MfaParams: omega_1 must be >= 0");
    for (double t : {T1a, T2a, T1b, T2b})
      if (!(t > 0.0)) throw std::invalid_argument("MfaParams: relaxation times must be > 0");
  }

  static MfaParams from_rates(double omega_a, double Delta, double omega_1, double g, const QubitChannel& a,
                              const QubitChannel& b) {
    const auto ra = relaxation_times(a), rb = relaxation_times(b);
    return {omega_a, Delta, omega_1, g, ra.T1, ra.T2, rb.T1, rb.T2, ra.kz0, rb.kz0};
  }
};

struct MfaChannels {
  QubitChannel a, b;
};

/// Caption parameter set in units of ω_a.
inline MfaChannels fig4_channels() {
  const double g1a = 1e-2, gpa = 1e-1 * g1a;
  return {{g1a, gpa, 0.005}, {10.0 * g1a, 10.0 * gpa, 1e-4}};
}

inline MfaParams fig4_params(double g = 0.1, double delta_sign = 1.0) {
  const auto ch = fig4_channels();
  const double th = std::numbers::pi / 8.0;
  return MfaParams::from_rates(1.0, delta_sign * std::sin(th), std::cos(th), g, ch.a, ch.b);
}

/// Decoupled thermal point with a small transverse kick on spin a.
inline MfaVector mfa_default_initial(const MfaParams& p, double kick = 0.05) {
  MfaVector y;
  y << kick, 0.0, p.kz0a, 0.0, 0.0, p.kz0b;
  return y;
}

inline MfaVector mfa_rhs(const MfaVector& k, const MfaParams& p) {
  const double ax = k(0), ay = k(1), az = k(2), bx = k(3), by = k(4), bz = k(5);
  const double ra = 1.0 / p.T2a, la = 1.0 / p.T1a, rb = 1.0 / p.T2b, lb = 1.0 / p.T1b;
  MfaVector d;
  d(0) = -p.omega_a * ay - ax * ra;
  d(1) = p.omega_a * ax - p.g * az * bz - ay * ra;
  d(2) = p.g * ay * bz - (az - p.kz0a) * la;
  d(3) = p.Delta * by - p.g * ax * by - bx * rb;
  d(4) = -p.Delta * bx - p.omega_1 * bz + p.g * ax * bx - by * rb;
  d(5) = p.omega_1 * by - (bz - p.kz0b) * lb;
  return d;
}

/// Driven single-spin Bloch fixed point of spin b at g = 0 (3×3 linear solve).
inline Eigen::Vector3d mfa_spin_b_fixed_point(const MfaParams& p) {
  const double rb = 1.0 / p.T2b, lb = 1.0 / p.T1b;
  Eigen::Matrix3d a;
  a << -rb, p.Delta, 0.0, -p.Delta, -rb, -p.omega_1, 0.0, p.omega_1, -lb;
  return a.fullPivLu().solve(Eigen::Vector3d(0.0, 0.0, -p.kz0b * lb));
}

struct MfaTrajectory {
  std::vector<double> t;
  std::vector<MfaVector> k;
  double max_norm = 0.0;  // max over samples of max(|k_a|, |k_b|)

  csv::Table table() const {
    csv::Table tab;
    tab.columns = {"t", "kax", "kay", "kaz", "kbx", "kby", "kbz"};
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::vector<double> row{t[i]};
      row.insert(row.end(), k[i].data(), k[i].data() + 6);
      tab.rows.push_back(std::move(row));
    }
    return tab;
  }
};

inline MfaTrajectory integrate_mfa(const MfaVector& k0, const MfaParams& p, double t_end, double dt_out,
                                   ode::AdaptiveOptions opt = {.atol = 1e-11, .rtol = 1e-9}) {
  p.validate();
  MfaTrajectory tr;
  auto f = [&p](double, const MfaVector& k) -> MfaVector { return mfa_rhs(k, p); };
  auto observe = [&tr](double t, const MfaVector& k) {
    tr.t.push_back(t);
    tr.k.push_back(k);
    tr.max_norm = std::max({tr.max_norm, k.head<3>().norm(), k.tail<3>().norm()});
  };
  auto check = [](double t, MfaVector& k) {
    if (!k.allFinite()) throw NumericalError("integrate_mfa: non-finite state at t = " + csv::format(t));
  };
  ode::integrate_adaptive(f, k0, 0.0, t_end, dt_out, opt, observe, check);
  return tr;
}

// ------------------------------------------------------------ limit cycles

enum class Verdict { fixed_point, limit_cycle, undecided };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::fixed_point: return "fixed_point";
    case Verdict::limit_cycle: return "limit_cycle";
    case Verdict::undecided: return "undecided";
  }
  return "?";
}

struct CycleReport {
  Verdict verdict = Verdict::undecided;
  double period = std::numeric_limits<double>::quiet_NaN();
  double amplitude = 0.0;   // peak-to-peak of k_ax in the tail
  double max_spread = 0.0;  // largest peak-to-peak over all components
  double jitter = std::numeric_limits<double>::quiet_NaN();
  std::size_t periods = 0;

  double angular_frequency() const { return 2.0 * std::numbers::pi / period; }
};

struct CycleOptions {
  double settle_fraction = 0.5;
  double tol = 1e-4;  // fixed point when every tail peak-to-peak is below this
  std::size_t min_periods = 10;
  double max_jitter = 0.05;
};

/// Samples must be time-ordered. k_ax (component 0) drives the period estimate.
inline CycleReport detect_limit_cycle(const std::vector<double>& t, const std::vector<MfaVector>& k,
                                      const CycleOptions& opt = {}) {
  if (t.size() != k.size() || t.size() < 3) throw std::invalid_argument("detect_limit_cycle: need matching samples");
  if (opt.settle_fraction < 0.0 || opt.settle_fraction >= 1.0)
    throw std::invalid_argument("detect_limit_cycle: settle_fraction must be in [0, 1)");
  const double t_cut = t.front() + opt.settle_fraction * (t.back() - t.front());
  const auto first = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), t_cut) - t.begin());

  CycleReport r;
  MfaVector lo = k[first], hi = k[first];
  double mean = 0.0;
  for (std::size_t i = first; i < k.size(); ++i) {
    lo = lo.cwiseMin(k[i]);
    hi = hi.cwiseMax(k[i]);
    mean += k[i](0);
  }
  mean /= static_cast<double>(k.size() - first);
  const MfaVector spread = hi - lo;
  r.amplitude = spread(0);
  r.max_spread = spread.maxCoeff();
  if (r.max_spread < opt.tol) {
    r.verdict = Verdict::fixed_point;
    return r;
  }

  std::vector<double> up;
  for (std::size_t i = first + 1; i < k.size(); ++i) {
    const double a = k[i - 1](0) - mean, b = k[i](0) - mean;
    if (a < 0.0 && b >= 0.0) up.push_back(t[i - 1] + (t[i] - t[i - 1]) * (-a) / (b - a));
  }
  if (up.size() < opt.min_periods + 1) return r;
  std::vector<double> periods;
  for (std::size_t i = 1; i < up.size(); ++i) periods.push_back(up[i] - up[i - 1]);
  const auto [pmin, pmax] = std::minmax_element(periods.begin(), periods.end());
  r.periods = periods.size();
  r.period = (up.back() - up.front()) / static_cast<double>(periods.size());
  r.jitter = (*pmax - *pmin) / r.period;
  if (r.jitter < opt.max_jitter) r.verdict = Verdict::limit_cycle;
  return r;
}

inline CycleReport detect_limit_cycle(const MfaTrajectory& tr, const CycleOptions& opt = {}) {
  return detect_limit_cycle(tr.t, tr.k, opt);
}

// ------------------------------------------------------------ detuning scans

enum class ScanPolicy { fixed_omega1, fixed_omegaR };

struct ScanRow {
  double Delta;
  double g;
  CycleReport report;
};

struct ScanSettings {
  ScanPolicy policy = ScanPolicy::fixed_omega1;
  double t_end = 6000.0;
  double dt_out = 0.2;
  double kick = 0.05;
  CycleOptions cycle{.settle_fraction = 2.0 / 3.0};
};

/// For fixed_omegaR, ω₁ = √(ω_R² − Δ²) with ω_R taken from the template.
inline std::vector<ScanRow> detuning_scan(const MfaParams& tmpl, const std::vector<double>& deltas,
                                          const std::vector<double>& gs, const ScanSettings& s = {}) {
  std::vector<ScanRow> rows;
  const double omega_R = tmpl.omega_R();
  for (double g : gs)
    for (double d : deltas) {
      MfaParams p = tmpl;
      p.Delta = d;
      p.g = g;
      if (s.policy == ScanPolicy::fixed_omegaR) {
        if (std::abs(d) > omega_R) throw std::invalid_argument("detuning_scan: |Delta| exceeds omega_R");
        p.omega_1 = std::sqrt(omega_R * omega_R - d * d);
      }
      auto tr = integrate_mfa(mfa_default_initial(p, s.kick), p, s.t_end, s.dt_out);
      rows.push_back({d, g, detect_limit_cycle(tr, s.cycle)});
    }
  return rows;
}

// ------------------------------------------------------- full 4×4 counterpart

/// H = ω_a S_az − Δ S_bz + ω₁ S_bx + 2g S_ax S_bz with S = σ/2.
inline CMatrix mfa_hamiltonian(const MfaParams& p) {
  const Dims dims{2, 2};
  CMatrix sax = embed(pauli::x(), 0, dims), saz = embed(pauli::z(), 0, dims);
  CMatrix sbx = embed(pauli::x(), 1, dims), sbz = embed(pauli::z(), 1, dims);
  return 0.5 * p.omega_a * saz - 0.5 * p.Delta * sbz + 0.5 * p.omega_1 * sbx + 0.5 * p.g * sax * sbz;
}

inline MasterEquation mfa_full_equation(const MfaParams& p, const MfaChannels& ch, double gamma_D) {
  ThetaSpec th;
  th.gamma_D = gamma_D;
  return MasterEquation({2, 2}, mfa_hamiltonian(p), th, LindbladSpec{{ch.a, ch.b}});
}

/// Product state with single-spin Bloch vectors k_a, k_b.
inline DensityMatrix mfa_product_state(const MfaVector& k) {
  CMatrix ra = pauli::bloch_state(k.head<3>()), rb = pauli::bloch_state(k.tail<3>());
  return DensityMatrix({2, 2}, hermitian_part(kron(ra, rb)));
}

}  // namespace sdme
