#pragma once

// Right-hand side of the modified master equation
//
//   dρ/dt = i[ρ, H] − Θρ − ρΘ + 2⟨Θ⟩ρ + L(ρ),   Θ = γ_H Q^(H) + γ_D Q^(D),
//
// and its integration with trajectory recording.

#include "sdme/csv.hpp"
#include "sdme/entanglement.hpp"
#include "sdme/gellmann.hpp"
#include "sdme/lindblad.hpp"
#include "sdme/linalg.hpp"
#include "sdme/ode.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sdme {

struct ThetaSpec {
  double gamma_D = 0.0;
  double gamma_H = 0.0;
  std::vector<EntanglementConfig> pairs;  // empty with gamma_D > 0: pair (0, 1)
  ThermalConfig thermal;
  std::optional<CMatrix> fixed;  // state-independent contribution to Θ
};

class MasterEquation {
 public:
  MasterEquation(Dims dims, CMatrix h, ThetaSpec theta = {}, std::optional<LindbladSpec> lindblad = std::nullopt)
      : dims_(std::move(dims)), h_(std::move(h)), spec_(std::move(theta)) {
    const int n = total_dim(dims_);
    if (h_.rows() != n || h_.cols() != n) throw std::invalid_argument("MasterEquation: Hamiltonian dimension mismatch");
    if (hermiticity_error(h_) > kHermitianTol) throw std::invalid_argument("MasterEquation: Hamiltonian not Hermitian");
    if (spec_.gamma_D < 0.0 || spec_.gamma_H < 0.0) throw std::invalid_argument("ThetaSpec: rates must be >= 0");
    if (spec_.thermal.beta < 0.0) throw std::invalid_argument("ThetaSpec: beta must be >= 0");
    if (spec_.fixed && (spec_.fixed->rows() != n || hermiticity_error(*spec_.fixed) > kHermitianTol))
      throw std::invalid_argument("ThetaSpec: fixed Theta must be Hermitian with matching dimension");
    if (spec_.gamma_D > 0.0) {
      if (spec_.pairs.empty()) spec_.pairs.push_back({});
      for (const auto& p : spec_.pairs) generators_.emplace_back(dims_, p);
    }
    if (lindblad) {
      LindbladDissipator d(dims_, *lindblad);
      if (!d.empty()) dissipator_ = std::move(d);
    }
  }

  const Dims& dims() const { return dims_; }
  const CMatrix& hamiltonian() const { return h_; }
  const ThetaSpec& theta_spec() const { return spec_; }
  const std::vector<EntanglementGenerator>& entanglement() const { return generators_; }

  /// Θ evaluated at ρ.
  CMatrix theta(const CMatrix& rho) const {
    const auto n = rho.rows();
    CMatrix th = spec_.fixed ? *spec_.fixed : CMatrix::Zero(n, n);
    if (spec_.gamma_H > 0.0)
      th += spec_.gamma_H * (spec_.thermal.beta * h_ + log_clamped(rho, spec_.thermal.log_floor));
    for (const auto& g : generators_) th += spec_.gamma_D * g.q_operator(rho);
    return th;
  }

  CMatrix rhs(const CMatrix& rho) const {
    const cplx i(0, 1);
    CMatrix out = i * (rho * h_ - h_ * rho);
    if (spec_.fixed || spec_.gamma_H > 0.0 || !generators_.empty()) {
      CMatrix th = theta(rho);
      CMatrix th_rho = th * rho;
      out -= th_rho + th_rho.adjoint();
      out += (2.0 * th_rho.trace().real()) * rho;
    }
    if (dissipator_) out += dissipator_->apply(rho);
    return hermitian_part(out);
  }

 private:
  Dims dims_;
  CMatrix h_;
  ThetaSpec spec_;
  std::vector<EntanglementGenerator> generators_;
  std::optional<LindbladDissipator> dissipator_;
};

inline CMatrix mme_rhs(const DensityMatrix& rho, const HermitianOperator& h, const ThetaSpec& theta,
                       const std::optional<LindbladSpec>& lindblad = std::nullopt) {
  if (h.dim() != rho.dim()) throw std::invalid_argument("mme_rhs: dimension mismatch");
  return MasterEquation(rho.dims(), h.matrix(), theta, lindblad).rhs(rho.matrix());
}

/// d⟨G_{a,b}⟩/dt = Tr(G_{a,b} dρ/dt) for a bipartite system.
inline RMatrix bloch_matrix_rhs(const CMatrix& rho, const MasterEquation& eq, const FactorizedBasis& basis) {
  return basis.coefficients(eq.rhs(rho));
}

/// A named group of scalar observables evaluated on each sample.
struct Probe {
  std::vector<std::string> names;
  std::function<std::vector<double>(const CMatrix&)> eval;
};

namespace probes {

inline Probe trace() {
  return {{"trace"}, [](const CMatrix& r) { return std::vector<double>{r.trace().real()}; }};
}

inline Probe purity() {
  return {{"purity"}, [](const CMatrix& r) { return std::vector<double>{trace_product(r, r).real()}; }};
}

inline Probe tau(const Dims& dims, EntanglementConfig cfg = {}, std::string name = "tau") {
  auto gen = std::make_shared<EntanglementGenerator>(dims, cfg);
  return {{std::move(name)}, [gen](const CMatrix& r) { return std::vector<double>{gen->tau(r)}; }};
}

inline Probe expectation(std::string name, CMatrix op) {
  return {{std::move(name)}, [op = std::move(op)](const CMatrix& r) { return std::vector<double>{sdme::expectation(op, r)}; }};
}

/// ⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩ of qubit `site`, named prefix+"x" etc.
inline Probe qubit_bloch(const Dims& dims, std::size_t site, const std::string& prefix) {
  if (site >= dims.size() || dims[site] != 2) throw std::invalid_argument("qubit_bloch: subsystem is not a qubit");
  std::vector<CMatrix> ops = {embed(pauli::x(), site, dims), embed(pauli::y(), site, dims), embed(pauli::z(), site, dims)};
  return {{prefix + "x", prefix + "y", prefix + "z"}, [ops](const CMatrix& r) {
            return std::vector<double>{sdme::expectation(ops[0], r), sdme::expectation(ops[1], r),
                                       sdme::expectation(ops[2], r)};
          }};
}

inline Probe free_energy(CMatrix h, ThermalConfig cfg, std::string name = "UH") {
  return {{std::move(name)},
          [h = std::move(h), cfg](const CMatrix& r) { return std::vector<double>{sdme::free_energy(r, h, cfg)}; }};
}

/// Singular values of the full Bloch matrix, descending, named sv1..svN.
inline Probe bloch_singular_values(int d_a, int d_b) {
  auto basis = std::make_shared<FactorizedBasis>(d_a, d_b);
  const auto count = std::min(basis->rows(), basis->cols());
  std::vector<std::string> names;
  for (Eigen::Index i = 1; i <= count; ++i) names.push_back("sv" + std::to_string(i));
  return {names, [basis](const CMatrix& r) {
            auto test = is_product(BlochMatrix{basis->coefficients(r)}, 0.0);
            return std::vector<double>(test.singular_values.data(),
                                       test.singular_values.data() + test.singular_values.size());
          }};
}

}  // namespace probes

enum class Method { rk45, rk4 };

struct IntegrationControls {
  Method method = Method::rk45;
  ode::AdaptiveOptions adaptive;
  double rk4_step = 1e-3;
  double sample_interval = 0.0;  // 0: 200 samples over the run
  std::size_t store_state_every = 0;  // store every k-th sample; 0 stores none
  bool renormalize = false;
  double trace_tol = 1e-8;
  double hermiticity_tol = 1e-10;
  double positivity_tol = 1e-8;
  std::size_t positivity_check_every = 1;
};

struct TrajectoryDiagnostics {
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  ode::Stats stats;
};

struct Trajectory {
  Dims dims;
  csv::Table table;  // first column "t"
  std::vector<double> state_times;
  std::vector<CMatrix> states;
  CMatrix final_state;
  TrajectoryDiagnostics diagnostics;

  std::vector<double> times() const { return table.column("t"); }
  std::vector<double> column(const std::string& name) const { return table.column(name); }
  void write_csv(std::ostream& os) const { table.write(os); }
};

/// Integrates the master equation from rho0 over [0, t_end], recording the
/// probes on every sample. Throws NumericalError when the trace, Hermiticity
/// or positivity of ρ leaves its tolerance.
inline Trajectory integrate(const DensityMatrix& rho0, const MasterEquation& eq, double t_end,
                            const IntegrationControls& ctl = {}, const std::vector<Probe>& probe_list = {}) {
  if (!(t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be positive");
  if (rho0.dims() != eq.dims()) throw std::invalid_argument("integrate: state dims do not match the model");

  Trajectory traj;
  traj.dims = rho0.dims();
  traj.table.columns.push_back("t");
  for (const auto& p : probe_list) traj.table.columns.insert(traj.table.columns.end(), p.names.begin(), p.names.end());

  auto& diag = traj.diagnostics;
  std::size_t steps = 0;
  std::size_t samples = 0;
  auto check = [&](double t, CMatrix& rho) {
    bool modified = false;
    if (ctl.renormalize) {
      rho /= rho.trace().real();
      modified = true;
    }
    const double tr_err = std::abs(rho.trace() - 1.0);
    const double h_err = hermiticity_error(rho);
    diag.max_trace_error = std::max(diag.max_trace_error, tr_err);
    diag.max_hermiticity_error = std::max(diag.max_hermiticity_error, h_err);
    std::ostringstream why;
    if (!(tr_err <= ctl.trace_tol)) why << "trace drift " << tr_err;
    if (!(h_err <= ctl.hermiticity_tol)) why << "Hermiticity error " << h_err;
    if (ctl.positivity_check_every > 0 && steps % ctl.positivity_check_every == 0) {
      const double lo = hermitian_eigen(rho).values.minCoeff();
      diag.min_eigenvalue = std::min(diag.min_eigenvalue, lo);
      if (lo < -ctl.positivity_tol) why << "negative eigenvalue " << lo;
    }
    ++steps;
    if (!why.str().empty()) throw NumericalError("integrate: " + why.str() + " at t = " + csv::format(t));
    return modified;
  };
  auto observe = [&](double t, const CMatrix& rho) {
    std::vector<double> row{t};
    for (const auto& p : probe_list) {
      auto v = p.eval(rho);
      row.insert(row.end(), v.begin(), v.end());
    }
    traj.table.rows.push_back(std::move(row));
    if (ctl.store_state_every > 0 && samples % ctl.store_state_every == 0) {
      traj.state_times.push_back(t);
      traj.states.push_back(rho);
    }
    ++samples;
  };
  auto f = [&eq](double, const CMatrix& rho) -> CMatrix { return eq.rhs(rho); };

  const double dt_out = ctl.sample_interval > 0.0 ? ctl.sample_interval : t_end / 200.0;
  CMatrix start = rho0.matrix();
  if (ctl.method == Method::rk45) {
    traj.final_state = ode::integrate_adaptive(f, start, 0.0, t_end, dt_out, ctl.adaptive, observe, check, &diag.stats);
  } else {
    const auto every = static_cast<std::size_t>(std::max(1.0, std::round(dt_out / ctl.rk4_step)));
    traj.final_state = ode::integrate_rk4(f, start, 0.0, t_end, ctl.rk4_step, every, observe, check);
  }
  return traj;
}

}  // namespace sdme
