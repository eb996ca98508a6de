#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "plap/csv.hpp"
#include "plap/error.hpp"

namespace plap {

/// Sampled positive radial solution. The profile is stored logarithmically
/// (ln u and u'/u) so that exponentially small tails stay representable.
class RadialProfile {
 public:
  RadialProfile() = default;

  RadialProfile(std::vector<double> r, std::vector<double> log_u, std::vector<double> dlog_u, std::string meta = {})
      : r_(std::move(r)), log_u_(std::move(log_u)), dlog_u_(std::move(dlog_u)), meta_(std::move(meta)) {
    require(r_.size() == log_u_.size() && r_.size() == dlog_u_.size(), ErrorKind::Domain,
            "profile arrays must have equal length");
    for (std::size_t i = 1; i < r_.size(); ++i)
      require(r_[i] > r_[i - 1], ErrorKind::Domain, "profile abscissae must be strictly increasing");
    for (double v : log_u_) require(std::isfinite(v), ErrorKind::NotPositive, "profile values must be positive");
  }

  /// Samples closed forms ln u(r) and (ln u)'(r) on `r`.
  static RadialProfile sample(const std::vector<double>& r, const std::function<double(double)>& log_u,
                              const std::function<double(double)>& dlog_u, std::string meta = {}) {
    std::vector<double> lu(r.size()), dl(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      lu[i] = log_u(r[i]);
      dl[i] = dlog_u(r[i]);
    }
    return RadialProfile(r, std::move(lu), std::move(dl), std::move(meta));
  }

  std::size_t size() const { return r_.size(); }
  bool empty() const { return r_.empty(); }
  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& log_u() const { return log_u_; }
  const std::vector<double>& dlog_u() const { return dlog_u_; }
  const std::string& meta() const { return meta_; }
  void set_meta(std::string meta) { meta_ = std::move(meta); }

  double r(std::size_t i) const { return r_[i]; }
  double u(std::size_t i) const { return std::exp(log_u_[i]); }
  double du(std::size_t i) const { return std::exp(log_u_[i]) * dlog_u_[i]; }
  double r_min() const { return r_.front(); }
  double r_max() const { return r_.back(); }

  /// u -> scale * u.
  RadialProfile scaled(double scale) const {
    require(scale > 0.0, ErrorKind::Domain, "profile scale must be positive");
    std::vector<double> lu = log_u_;
    const double shift = std::log(scale);
    for (double& v : lu) v += shift;
    return RadialProfile(r_, std::move(lu), dlog_u_, meta_);
  }

  void write_csv(const std::string& path) const {
    csv::Writer w(path);
    w.comment(meta_.empty() ? std::string("radial profile") : meta_);
    w.header({"r", "u", "du"});
    for (std::size_t i = 0; i < size(); ++i) w.row({r_[i], u(i), du(i)});
  }

  static RadialProfile read_csv(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::Io, "cannot open " + path);
    std::string line, meta;
    std::vector<double> r, lu, dl;
    bool header_seen = false;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line[0] == '#') {
        if (meta.empty()) meta = line.size() > 2 ? line.substr(2) : std::string();
        continue;
      }
      if (!header_seen) {
        require(line == "r,u,du", ErrorKind::Io, "unexpected profile header: " + line);
        header_seen = true;
        continue;
      }
      std::istringstream row(line);
      std::string cell;
      double vals[3];
      for (double& v : vals) {
        require(static_cast<bool>(std::getline(row, cell, ',')), ErrorKind::Io, "short profile row");
        v = std::stod(cell);
      }
      require(vals[1] > 0.0, ErrorKind::NotPositive, "profile value must be positive");
      r.push_back(vals[0]);
      lu.push_back(std::log(vals[1]));
      dl.push_back(vals[2] / vals[1]);
    }
    return RadialProfile(std::move(r), std::move(lu), std::move(dl), std::move(meta));
  }

 private:
  std::vector<double> r_;
  std::vector<double> log_u_;
  std::vector<double> dlog_u_;
  std::string meta_;
};

/// `samples` points spaced uniformly in ln r on [r_lo, r_hi].
inline std::vector<double> log_grid(double r_lo, double r_hi, std::size_t samples) {
  require(r_lo > 0.0 && r_hi > r_lo, ErrorKind::Domain, "log grid needs 0 < r_lo < r_hi");
  require(samples >= 2, ErrorKind::Domain, "log grid needs at least two samples");
  std::vector<double> r(samples);
  const double l0 = std::log(r_lo), l1 = std::log(r_hi);
  for (std::size_t i = 0; i < samples; ++i) {
    r[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(samples - 1));
  }
  r.front() = r_lo;
  r.back() = r_hi;
  return r;
}

/// Shape-preserving (Fritsch-Butland) cubic Hermite interpolant.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    require(n >= 2 && y_.size() == n, ErrorKind::Domain, "monotone cubic needs at least two points");
    d_.assign(n, 0.0);
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      h[k] = x_[k + 1] - x_[k];
      delta[k] = (y_[k + 1] - y_[k]) / h[k];
    }
    if (n == 2) {
      d_[0] = d_[1] = delta[0];
      return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (delta[k - 1] * delta[k] <= 0.0) {
        d_[k] = 0.0;
      } else if (delta[k - 1] == delta[k]) {
        d_[k] = delta[k];
      } else {
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        d_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
      }
    }
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

  bool contains(double x) const { return x >= x_.front() && x <= x_.back(); }

  double operator()(double x) const { return eval(x, false); }
  double derivative(double x) const { return eval(x, true); }

 private:
  static double end_slope(double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(d) > std::abs(3.0 * d0)) return 3.0 * d0;
    return d;
  }

  double eval(double x, bool deriv) const {
    require(contains(x), ErrorKind::OutOfRange, "interpolation abscissa outside sampled range");
    std::size_t k = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
    k = k == 0 ? 0 : k - 1;
    if (k >= x_.size() - 1) k = x_.size() - 2;
    const double h = x_[k + 1] - x_[k];
    const double s = (x - x_[k]) / h;
    const double y0 = y_[k], y1 = y_[k + 1], m0 = d_[k] * h, m1 = d_[k + 1] * h;
    if (deriv) {
      const double dh00 = 6.0 * s * s - 6.0 * s;
      const double dh10 = 3.0 * s * s - 4.0 * s + 1.0;
      const double dh01 = -dh00;
      const double dh11 = 3.0 * s * s - 2.0 * s;
      return (dh00 * y0 + dh10 * m0 + dh01 * y1 + dh11 * m1) / h;
    }
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
  }

  std::vector<double> x_, y_, d_;
};

/// Abscissa used when interpolating ln u: ln r makes power laws linear,
/// r makes exponentials linear.
enum class Abscissa { LogR, R };

/// ln u of a profile, interpolated with the monotone cubic.
class ProfileInterpolant {
 public:
  explicit ProfileInterpolant(const RadialProfile& profile, Abscissa abscissa = Abscissa::LogR)
      : abscissa_(abscissa) {
    require(profile.size() >= 2, ErrorKind::Domain, "profile needs at least two samples");
    require(abscissa == Abscissa::R || profile.r_min() > 0.0, ErrorKind::Domain,
            "log-radius interpolation needs r > 0");
    std::vector<double> x(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) x[i] = to_x(profile.r(i));
    cubic_ = MonotoneCubic(std::move(x), profile.log_u());
    r_min_ = profile.r_min();
    r_max_ = profile.r_max();
  }

  bool contains(double r) const { return r >= r_min_ && r <= r_max_; }

  double log_u(double r) const {
    check(r);
    return cubic_(clamped(r));
  }

  /// d ln u / d r.
  double dlog_u(double r) const {
    check(r);
    const double d = cubic_.derivative(clamped(r));
    return abscissa_ == Abscissa::LogR ? d / r : d;
  }

 private:
  double to_x(double r) const { return abscissa_ == Abscissa::LogR ? std::log(r) : r; }

  void check(double r) const {
    require(contains(r), ErrorKind::OutOfRange,
            "radius " + csv::number(r) + " outside profile range [" + csv::number(r_min_) + ", " +
                csv::number(r_max_) + "]");
  }
  double clamped(double r) const { return std::clamp(to_x(r), cubic_.x_min(), cubic_.x_max()); }

  Abscissa abscissa_;
  MonotoneCubic cubic_;
  double r_min_ = 0.0, r_max_ = 0.0;
};

}  // namespace plap
