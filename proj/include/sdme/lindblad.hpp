#pragma once

#include "sdme/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sdme {

/// Per-qubit damping: relaxation rate Γ₁, dephasing rate Γ_φ and thermal
/// occupation n̂₀.
struct QubitChannel {
  double gamma1 = 0.0;
  double gamma_phi = 0.0;
  double n0 = 0.0;
};

/// One channel per subsystem, in subsystem order. Subsystems with nonzero
/// rates must be qubits.
struct LindbladSpec {
  std::vector<QubitChannel> channels;
};

struct RelaxationTimes {
  double T1 = std::numeric_limits<double>::infinity();
  double T2 = std::numeric_limits<double>::infinity();
  double kz0 = -1.0;  // equilibrium ⟨σ_z⟩
  bool finite = false;
};

/// 1/T₁ = Γ₁(2n̂₀+1), 1/T₂ = (Γ₁/2 + Γ_φ)(2n̂₀+1), k_z0 = −1/(2n̂₀+1).
inline RelaxationTimes relaxation_times(const QubitChannel& ch) {
  if (ch.gamma1 < 0.0 || ch.gamma_phi < 0.0 || ch.n0 < 0.0)
    throw std::invalid_argument("relaxation_times: rates and occupation must be >= 0");
  RelaxationTimes r;
  const double thermal = 2.0 * ch.n0 + 1.0;
  r.kz0 = -1.0 / thermal;
  if (ch.gamma1 > 0.0) r.T1 = 1.0 / (ch.gamma1 * thermal);
  if (ch.gamma1 > 0.0 || ch.gamma_phi > 0.0) r.T2 = 1.0 / ((0.5 * ch.gamma1 + ch.gamma_phi) * thermal);
  r.finite = std::isfinite(r.T1) && std::isfinite(r.T2);
  return r;
}

/// D_ρ(X) = X ρ X† − (X†X ρ + ρ X†X)/2.
inline CMatrix lindbladian(const CMatrix& x, const CMatrix& rho) {
  CMatrix xdx = x.adjoint() * x;
  return x * rho * x.adjoint() - 0.5 * (xdx * rho + rho * xdx);
}

/// Jump operators with their prefactors, embedded in the full space.
class LindbladDissipator {
 public:
  LindbladDissipator(const Dims& dims, const LindbladSpec& spec) {
    if (spec.channels.size() != dims.size())
      throw std::invalid_argument("LindbladSpec: one channel per subsystem required");
    // σ± = σ_x ± iσ_y (note: twice the usual ladder operators).
    CMatrix sp = pauli::x() + cplx(0, 1) * pauli::y();
    CMatrix sm = pauli::x() - cplx(0, 1) * pauli::y();
    for (std::size_t s = 0; s < dims.size(); ++s) {
      const auto& ch = spec.channels[s];
      if (ch.gamma1 < 0.0 || ch.gamma_phi < 0.0 || ch.n0 < 0.0)
        throw std::invalid_argument("LindbladSpec: rates and occupation must be >= 0");
      if (ch.gamma1 == 0.0 && ch.gamma_phi == 0.0) continue;
      if (dims[s] != 2) throw std::invalid_argument("LindbladSpec: per-qubit channels need a dimension-2 subsystem");
      add((ch.n0 + 1.0) * ch.gamma1 / 4.0, embed(sm, s, dims));
      add(ch.n0 * ch.gamma1 / 4.0, embed(sp, s, dims));
      add((2.0 * ch.n0 + 1.0) * ch.gamma_phi / 2.0, embed(pauli::z(), s, dims));
    }
  }

  bool empty() const { return ops_.empty(); }

  CMatrix apply(const CMatrix& rho) const {
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      const auto& x = ops_[i];
      out += rates_[i] * (x * rho * x.adjoint() - 0.5 * (xdx_[i] * rho + rho * xdx_[i]));
    }
    return out;
  }

 private:
  void add(double rate, CMatrix x) {
    if (rate == 0.0) return;
    rates_.push_back(rate);
    xdx_.push_back(x.adjoint() * x);
    ops_.push_back(std::move(x));
  }

  std::vector<double> rates_;
  std::vector<CMatrix> ops_, xdx_;
};

inline CMatrix lindblad_dissipator(const DensityMatrix& rho, const LindbladSpec& spec) {
  return hermitian_part(LindbladDissipator(rho.dims(), spec).apply(rho.matrix()));
}

}  // namespace sdme
