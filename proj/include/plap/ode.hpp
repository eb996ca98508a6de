#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with standard step control.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "plap/error.hpp"

namespace plap::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Tolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t max_steps = 2'000'000;
};

enum class Outcome { Reached, Stopped };

namespace detail {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat (difference between 5th and embedded 4th order weights)
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace detail

/// One Dormand-Prince step from (t, y) with size h. Returns the 5th order
/// solution in `y_new` and the local error estimate in `err`.
template <std::size_t N, class Rhs>
void dopri_step(const Rhs& rhs, double t, const State<N>& y, double h, State<N>& y_new, State<N>& err) {
  using namespace detail;
  State<N> k1, k2, k3, k4, k5, k6, k7, tmp;
  rhs(t, y, k1);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  rhs(t + c2 * h, tmp, k2);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  rhs(t + c3 * h, tmp, k3);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  rhs(t + c4 * h, tmp, k4);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  rhs(t + c5 * h, tmp, k5);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  rhs(t + h, tmp, k6);
  for (std::size_t i = 0; i < N; ++i)
    y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  rhs(t + h, y_new, k7);
  for (std::size_t i = 0; i < N; ++i)
    err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
}

/// Adaptive integrator state: carries the current step-size guess across calls
/// so a trajectory can be advanced output point by output point.
template <std::size_t N>
class Integrator {
 public:
  explicit Integrator(Tolerances tol = {}) : tol_(tol) {}

  std::size_t steps_taken() const { return steps_; }
  std::size_t steps_rejected() const { return rejected_; }

  /// Advances (t, y) to t_end (either direction). After each accepted step
  /// `observer(t, y)` is called; returning false stops the integration there.
  template <class Rhs, class Observer>
  Outcome advance(const Rhs& rhs, double& t, State<N>& y, double t_end, Observer&& observer) {
    const double span = t_end - t;
    if (span == 0.0) return Outcome::Reached;
    const double dir = span > 0.0 ? 1.0 : -1.0;
    if (h_ <= 0.0 || !std::isfinite(h_)) h_ = initial_step(rhs, t, y, std::abs(span));
    State<N> y_new, err;
    while ((t_end - t) * dir > 0.0) {
      require(steps_ + rejected_ < tol_.max_steps, ErrorKind::StepFailure, "maximum step count exceeded");
      const double remaining = std::abs(t_end - t);
      bool last = false;
      double h = h_;
      if (h >= remaining) {
        h = remaining;
        last = true;
      }
      const double h_floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
      require(h > h_floor || last, ErrorKind::StepFailure,
              "step size underflow at t=" + std::to_string(t));
      dopri_step<N>(rhs, t, y, dir * h, y_new, err);
      double norm = 0.0;
      bool finite = true;
      for (std::size_t i = 0; i < N; ++i) {
        if (!std::isfinite(y_new[i]) || !std::isfinite(err[i])) finite = false;
        const double scale = tol_.atol + tol_.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        const double r = err[i] / scale;
        norm += r * r;
      }
      norm = std::sqrt(norm / N);
      if (!finite) {
        // Treat non-finite stages as a rejected step.
        h_ = 0.25 * h;
        ++rejected_;
        require(h_ > h_floor, ErrorKind::StepFailure, "non-finite state at t=" + std::to_string(t));
        continue;
      }
      if (norm <= 1.0) {
        t = last ? t_end : t + dir * h;
        y = y_new;
        ++steps_;
        const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
        // Keep the unclamped step as the next guess when the clamp to t_end
        // shortened this one.
        h_ = last ? std::max(h_, h * factor) : h * factor;
        if (!observer(t, y)) return Outcome::Stopped;
      } else {
        h_ = h * std::max(0.2, 0.9 * std::pow(norm, -0.2));
        ++rejected_;
      }
    }
    return Outcome::Reached;
  }

  template <class Rhs>
  Outcome advance(const Rhs& rhs, double& t, State<N>& y, double t_end) {
    return advance(rhs, t, y, t_end, [](double, const State<N>&) { return true; });
  }

 private:
  template <class Rhs>
  double initial_step(const Rhs& rhs, double t, const State<N>& y, double span) const {
    State<N> f0;
    rhs(t, y, f0);
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double scale = tol_.atol + tol_.rtol * std::abs(y[i]);
      d0 += (y[i] / scale) * (y[i] / scale);
      d1 += (f0[i] / scale) * (f0[i] / scale);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    return std::min(h, span);
  }

  Tolerances tol_;
  double h_ = 0.0;
  std::size_t steps_ = 0;
  std::size_t rejected_ = 0;
};

/// `steps` uniform Dormand-Prince steps (5th order solution), no error control.
template <std::size_t N, class Rhs>
State<N> fixed_step(const Rhs& rhs, double t0, State<N> y, double t1, std::size_t steps) {
  require(steps > 0, ErrorKind::Domain, "fixed_step needs at least one step");
  const double h = (t1 - t0) / static_cast<double>(steps);
  State<N> y_new, err;
  for (std::size_t k = 0; k < steps; ++k) {
    dopri_step<N>(rhs, t0 + k * h, y, h, y_new, err);
    y = y_new;
  }
  return y;
}

}  // namespace plap::ode
