#pragma once

// Explicit Runge-Kutta integrators over Eigen vector/matrix states.
//
// The adaptive integrator uses the Dormand-Prince 5(4) pair with FSAL and
// lands exactly on every sample time, so observers see values at a fixed
// stride without interpolation.

#include "sdme/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>

namespace sdme::ode {

struct AdaptiveOptions {
  double atol = 1e-9;
  double rtol = 1e-7;
  double h_init = 0.0;  // 0 picks a step from the initial derivative
  double h_min = 1e-14;
  double h_max = 0.0;  // 0 means unbounded
  std::size_t max_steps = 50'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

namespace detail {

template <class S>
double error_norm(const S& err, const S& y0, const S& y1, double atol, double rtol) {
  auto scale = (atol + rtol * y0.cwiseAbs().array().max(y1.cwiseAbs().array()));
  return (err.cwiseAbs().array() / scale).maxCoeff();
}

/// Hooks may return bool to signal that they modified the state.
template <class Hook, class State>
bool run_hook(Hook& hook, double t, State& y) {
  if constexpr (std::is_same_v<std::invoke_result_t<Hook&, double, State&>, bool>) {
    return hook(t, y);
  } else {
    hook(t, y);
    return false;
  }
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1 and calls observe(t, y) at t0,
/// t0 + k*dt_out and t1. after_step(t, y) runs on every accepted step; it may
/// throw to abort, or modify y and return true. Returns the final state.
template <class State, class Rhs, class Observer, class StepHook>
State integrate_adaptive(Rhs&& f, State y, double t0, double t1, double dt_out, const AdaptiveOptions& opt,
                         Observer&& observe, StepHook&& after_step, Stats* stats = nullptr) {
  // Dormand-Prince coefficients.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (!(t1 > t0)) throw std::invalid_argument("integrate_adaptive: t_end must exceed t_start");
  if (!(dt_out > 0.0)) dt_out = t1 - t0;
  Stats local;
  Stats& st = stats ? *stats : local;

  State k1 = f(t0, y);
  ++st.rhs_evals;
  double h = opt.h_init;
  if (h <= 0.0) {
    const double d0 = y.cwiseAbs().maxCoeff();
    const double d1 = k1.cwiseAbs().maxCoeff();
    h = (d0 > 1e-5 && d1 > 1e-5) ? 0.01 * d0 / d1 : 1e-6;
    h = std::min(h, dt_out);
  }
  if (opt.h_max > 0.0) h = std::min(h, opt.h_max);

  observe(t0, static_cast<const State&>(y));
  double t = t0;
  std::size_t sample = 1;
  double next_out = std::min(t0 + dt_out, t1);

  while (t < t1) {
    if (st.accepted + st.rejected >= opt.max_steps) throw NumericalError("integrate_adaptive: step budget exhausted");
    bool hits_sample = false;
    double step = h;
    if (t + step >= next_out) {
      step = next_out - t;
      hits_sample = true;
    }

    State k2 = f(t + c2 * step, State(y + step * (a21 * k1)));
    State k3 = f(t + c3 * step, State(y + step * (a31 * k1 + a32 * k2)));
    State k4 = f(t + c4 * step, State(y + step * (a41 * k1 + a42 * k2 + a43 * k3)));
    State k5 = f(t + c5 * step, State(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    State k6 = f(t + step, State(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    State y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    State k7 = f(t + step, y_new);
    st.rhs_evals += 6;
    State err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = detail::error_norm(err, y, y_new, opt.atol, opt.rtol);

    if (!std::isfinite(en)) {
      ++st.rejected;
      h = 0.1 * step;
      if (h < opt.h_min) throw NumericalError("integrate_adaptive: non-finite derivative");
      continue;
    }
    const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    if (en <= 1.0) {
      ++st.accepted;
      t = hits_sample ? next_out : t + step;
      y = std::move(y_new);
      k1 = std::move(k7);
      if (detail::run_hook(after_step, t, y)) {
        k1 = f(t, y);
        ++st.rhs_evals;
      }
      if (hits_sample) {
        observe(t, static_cast<const State&>(y));
        ++sample;
        next_out = std::min(t0 + static_cast<double>(sample) * dt_out, t1);
        if (t1 - next_out < 1e-12 * std::max(1.0, std::abs(t1))) next_out = t1;
        // A truncated step says nothing about the natural step size.
        h = std::max(h, step * factor);
      } else {
        h = step * factor;
      }
      if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
    } else {
      ++st.rejected;
      h = step * std::max(0.2, factor);
      if (h < opt.h_min)
        throw NumericalError("integrate_adaptive: step size underflow at t = " + std::to_string(t));
    }
  }
  return y;
}

template <class State, class Rhs, class Observer>
State integrate_adaptive(Rhs&& f, State y, double t0, double t1, double dt_out, const AdaptiveOptions& opt,
                         Observer&& observe) {
  return integrate_adaptive(std::forward<Rhs>(f), std::move(y), t0, t1, dt_out, opt, std::forward<Observer>(observe),
                            [](double, State&) {});
}

/// One classical RK4 step.
template <class State, class Rhs>
State rk4_step(Rhs&& f, const State& y, double t, double h) {
  State k1 = f(t, y);
  State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
  State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
  State k4 = f(t + h, State(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Fixed-step RK4; observe(t, y) is called every `every` steps and at the end.
template <class State, class Rhs, class Observer, class StepHook>
State integrate_rk4(Rhs&& f, State y, double t0, double t1, double h, std::size_t every, Observer&& observe,
                    StepHook&& after_step) {
  if (!(t1 > t0) || !(h > 0.0)) throw std::invalid_argument("integrate_rk4: bad interval or step");
  const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / h - 1e-9));
  const double step = (t1 - t0) / static_cast<double>(n);
  every = std::max<std::size_t>(every, 1);
  observe(t0, static_cast<const State&>(y));
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = t0 + static_cast<double>(i - 1) * step;
    y = rk4_step(f, y, t, step);
    const double tn = i == n ? t1 : t0 + static_cast<double>(i) * step;
    detail::run_hook(after_step, tn, y);
    if (i % every == 0 || i == n) observe(tn, static_cast<const State&>(y));
  }
  return y;
}

}  // namespace sdme::ode
