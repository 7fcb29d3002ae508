#pragma once

// Embedded Dormand-Prince 5(4) integrator over Eigen vector states.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "srgeo/error.hpp"

namespace srgeo::ode {

struct StepControl {
  double rtol = 1e-12;
  double atol = 1e-12;
  double initial_step = 0.0;  ///< 0 selects a step from the local field scale.
  double min_step_rel = 1e-15;
  std::size_t max_steps = 50'000'000;
};

template <typename State>
struct StepResult {
  State y;
  State error;
};

/// One Dormand-Prince step of size h from (t, y).
template <typename State, typename Field>
StepResult<State> dp45_step(Field& f, double t, const State& y, double h) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const State k1 = f(t, y);
  const State k2 = f(t + c2 * h, State(y + h * (a21 * k1)));
  const State k3 = f(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
  const State k4 = f(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
  const State k5 =
      f(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
  const State k6 = f(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                                           a65 * k5)));
  State y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const State k7 = f(t + h, y_new);
  State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  return {std::move(y_new), std::move(err)};
}

template <typename State>
double error_norm(const State& err, const State& y0, const State& y1,
                  const StepControl& ctl) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double scale =
        ctl.atol + ctl.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    worst = std::max(worst, std::abs(err(i)) / scale);
  }
  return worst;
}

struct NoPostStep {
  template <typename State>
  void operator()(double, State&) const {}
};

struct NoObserver {
  template <typename State>
  bool operator()(double, const State&) const {
    return true;
  }
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Integrates y' = f(t, y) from t0 to t1 (either direction).
///
/// `post(t, y)` runs after every accepted step and may project y back onto
/// an invariant set. `observe(t, y)` sees the post-processed state and may
/// stop the integration early by returning false; the returned time is then
/// written to `t_stop`.
template <typename State, typename Field, typename Post = NoPostStep,
          typename Observer = NoObserver>
State integrate(Field&& f, State y, double t0, double t1, const StepControl& ctl,
                Post&& post = {}, Observer&& observe = {}, Stats* stats = nullptr,
                double* t_stop = nullptr) {
  const double span = t1 - t0;
  if (span == 0.0) return y;
  const double dir = span > 0 ? 1.0 : -1.0;

  double h = ctl.initial_step;
  if (h <= 0.0) {
    const double fy = f(t0, y).cwiseAbs().maxCoeff();
    const double sy = std::max(1e-3, y.cwiseAbs().maxCoeff());
    h = fy > 0 ? 0.01 * sy / fy : 1e-3;
    h = std::min({h, std::abs(span), 0.1});
    h = std::max(h, 1e-10 * std::abs(span));
  }
  h = std::min(h, std::abs(span));

  double t = t0;
  Stats local;
  for (std::size_t n = 0; n < ctl.max_steps; ++n) {
    const double remaining = t1 - t;
    if (dir * remaining <= 0.0) break;
    bool last = false;
    if (h >= std::abs(remaining)) {
      h = std::abs(remaining);
      last = true;
    }
    const double min_step = ctl.min_step_rel * std::max(1.0, std::abs(t));
    if (h < min_step) {
      throw Error(ErrorCode::StepSizeUnderflow,
                  "step size underflow at t = " + num_str(t));
    }
    auto step = dp45_step(f, t, y, dir * h);
    const double en = error_norm(step.error, y, step.y, ctl);
    if (!(en <= 1.0)) {
      ++local.rejected;
      const double fac = std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.2;
      h *= fac;
      continue;
    }
    ++local.accepted;
    t = last ? t1 : t + dir * h;
    y = std::move(step.y);
    post(t, y);
    if (!observe(t, static_cast<const State&>(y))) {
      if (t_stop) *t_stop = t;
      if (stats) *stats = local;
      return y;
    }
    if (last) break;
    const double fac = en > 0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2))) : 5.0;
    h *= fac;
  }
  if (dir * (t1 - t) > 0.0) {
    throw Error(ErrorCode::StepSizeUnderflow, "maximum step count exceeded");
  }
  if (t_stop) *t_stop = t;
  if (stats) *stats = local;
  return y;
}

}  // namespace srgeo::ode
