#pragma once

// Rescaling limits of radial solutions: dilation at the origin, translation to
// infinity, the Martin-kernel ratio and the Busemann function.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "plap/csv.hpp"
#include "plap/error.hpp"
#include "plap/profile.hpp"

namespace plap {

/// Unit vector in R^n.
class Direction {
 public:
  explicit Direction(std::vector<double> xi) : xi_(std::move(xi)) {
    require(!xi_.empty(), ErrorKind::Domain, "direction needs at least one component");
    double s = 0.0;
    for (double v : xi_) s += v * v;
    require(std::abs(std::sqrt(s) - 1.0) <= 1e-14, ErrorKind::Domain, "direction must be a unit vector");
  }

  /// Normalises an arbitrary nonzero vector.
  static Direction normalized(std::vector<double> v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    require(s > 0.0, ErrorKind::Domain, "cannot normalise the zero vector");
    const double inv = 1.0 / std::sqrt(s);
    for (double& c : v) c *= inv;
    // One Newton correction absorbs the rounding of the division.
    double s2 = 0.0;
    for (double c : v) s2 += c * c;
    const double fix = 1.5 - 0.5 * s2;
    for (double& c : v) c *= fix;
    return Direction(std::move(v));
  }

  std::size_t dim() const { return xi_.size(); }
  std::span<const double> components() const { return xi_; }
  double operator[](std::size_t i) const { return xi_[i]; }

 private:
  std::vector<double> xi_;
};

namespace blowup_detail {

inline double dot(std::span<const double> x, const Direction& xi) {
  require(x.size() == xi.dim(), ErrorKind::Domain, "dimension mismatch between point and direction");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * xi[i];
  return s;
}

inline double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// |x - t xi|
inline double distance_from_ray_point(std::span<const double> x, const Direction& xi, double t) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - t * xi[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace blowup_detail

/// t - |x - t xi|, evaluated without cancellation.
inline double busemann(std::span<const double> x, const Direction& xi, double t) {
  const double xn = blowup_detail::norm(x);
  require(t > xn, ErrorKind::Domain, "busemann needs t > |x|");
  const double proj = blowup_detail::dot(x, xi);
  const double dist = blowup_detail::distance_from_ray_point(x, xi, t);
  // t^2 - |x - t xi|^2 = 2t<x,xi> - |x|^2
  return (2.0 * t * proj - xn * xn) / (t + dist);
}

/// lim_{t -> inf} busemann(x, xi, t) = <x, xi>.
inline double busemann_limit(std::span<const double> x, const Direction& xi) { return blowup_detail::dot(x, xi); }

/// u(|x - t xi|) / u(t) from a radial profile, interpolated in (r, ln u).
inline double martin_kernel_estimate(const RadialProfile& profile, std::span<const double> x, const Direction& xi,
                                     double t) {
  require(t > 0.0, ErrorKind::Domain, "martin estimate needs t > 0");
  const double rho = blowup_detail::distance_from_ray_point(x, xi, t);
  const ProfileInterpolant interp(profile, Abscissa::R);
  require(interp.contains(rho) && interp.contains(t), ErrorKind::OutOfRange,
          "martin estimate needs the profile on [" + csv::number(std::min(rho, t)) + ", " +
              csv::number(std::max(rho, t)) + "]");
  if (rho == t) return 1.0;
  return std::exp(interp.log_u(rho) - interp.log_u(t));
}

struct RescaleReport {
  std::vector<double> scales;
  std::vector<double> sup_distance;
  std::vector<double> grad_distance;

  std::size_t size() const { return scales.size(); }

  void write_csv(const std::string& path, const std::string& comment = {}) const {
    csv::Writer w(path);
    if (!comment.empty()) w.comment(comment);
    w.header({"scale", "sup_distance", "grad_distance"});
    for (std::size_t k = 0; k < scales.size(); ++k) w.row({scales[k], sup_distance[k], grad_distance[k]});
  }
};

inline constexpr double kOriginWindow = 10.0;    // s in [1/10, 10]
inline constexpr double kTranslationWindow = 2.0;  // s in [-2, 2]
inline constexpr std::size_t kWindowSamples = 401;

/// u_k(s) = u(R_k s)/u(R_k) on s in [1/window, window] against s^{-gamma1}.
inline RescaleReport rescale_near_zero(const RadialProfile& profile, const std::vector<double>& radii, double gamma1,
                                       double window = kOriginWindow, std::size_t samples = kWindowSamples) {
  require(window >= 1.0 && samples >= 2, ErrorKind::Domain, "origin window must be >= 1 with >= 2 samples");
  RescaleReport rep;
  if (radii.empty()) return rep;
  const ProfileInterpolant interp(profile, Abscissa::LogR);
  const auto s_grid = window > 1.0 ? log_grid(1.0 / window, window, samples) : std::vector<double>{1.0};
  for (double R : radii) {
    require(R > 0.0, ErrorKind::Domain, "rescaling radii must be positive");
    require(interp.contains(R / window) && interp.contains(R * window), ErrorKind::OutOfRange,
            "profile does not cover R*[1/window, window] for R=" + csv::number(R));
    const double base = interp.log_u(R);
    double sup = 0.0, grad = 0.0;
    for (double s : s_grid) {
      const double rs = std::clamp(R * s, R / window, R * window);
      const double uk = std::exp(interp.log_u(rs) - base);
      const double duk = uk * interp.dlog_u(rs) * R;
      const double target = std::pow(s, -gamma1);
      const double dtarget = -gamma1 * target / s;
      sup = std::max(sup, std::abs(uk - target));
      grad = std::max(grad, std::abs(duk - dtarget));
    }
    rep.scales.push_back(R);
    rep.sup_distance.push_back(sup);
    rep.grad_distance.push_back(grad);
  }
  return rep;
}

/// v_k(s) = u(t_k + s)/u(t_k) on s in [-window, window] against e^{-alpha s}.
inline RescaleReport translate_rescale_at_infinity(const RadialProfile& profile, const std::vector<double>& shifts,
                                                   double alpha, double window = kTranslationWindow,
                                                   std::size_t samples = kWindowSamples) {
  require(window >= 0.0 && samples >= 2, ErrorKind::Domain, "translation window must be >= 0");
  RescaleReport rep;
  if (shifts.empty()) return rep;
  const ProfileInterpolant interp(profile, Abscissa::R);
  for (double t : shifts) {
    require(interp.contains(t - window) && interp.contains(t + window), ErrorKind::OutOfRange,
            "profile does not cover [t-S, t+S] for t=" + csv::number(t));
    const double base = interp.log_u(t);
    double sup = 0.0, grad = 0.0;
    const std::size_t count = window > 0.0 ? samples : 1;
    for (std::size_t i = 0; i < count; ++i) {
      const double s = count == 1 ? 0.0
                                  : -window + 2.0 * window * static_cast<double>(i) / static_cast<double>(count - 1);
      const double vk = std::exp(interp.log_u(t + s) - base);
      const double dvk = vk * interp.dlog_u(t + s);
      const double target = std::exp(-alpha * s);
      sup = std::max(sup, std::abs(vk - target));
      grad = std::max(grad, std::abs(dvk + alpha * target));
    }
    rep.scales.push_back(t);
    rep.sup_distance.push_back(sup);
    rep.grad_distance.push_back(grad);
  }
  return rep;
}

}  // namespace plap
