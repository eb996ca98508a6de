#pragma once

// Radial and one-dimensional reductions of the p-Laplace equations:
//   ((v')^{p-1})' = lambda v^{p-1}                                 (1-D profile)
//   (r^{n-1}|u'|^{p-2}u')' = lambda r^{n-1} u^{p-1}                 (exterior eigenfunction)
//   -(r^{n-1}|u'|^{p-2}u')' - mu r^{n-1-p} u^{p-1} + lambda r^{n-1} u^{p-1} = A r^{n-1} u^{q-1}
// Every system is integrated in the flux variable m = r^{n-1}|u'|^{p-2}u'.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "plap/error.hpp"
#include "plap/indicial.hpp"
#include "plap/ode.hpp"
#include "plap/params.hpp"
#include "plap/profile.hpp"

namespace plap {

inline constexpr double kOverflowBarrier = 1e150;
inline constexpr double kZeroBarrier = 1e-150;

enum class ShootClass { Decaying, BlowUp, HitZero };

constexpr std::string_view to_string(ShootClass c) {
  switch (c) {
    case ShootClass::Decaying: return "Decaying";
    case ShootClass::BlowUp: return "BlowUp";
    case ShootClass::HitZero: return "HitZero";
  }
  return "?";
}

struct ShootResult {
  RadialProfile profile;
  double shoot_param = 0.0;  // initial ratio u'/u (exterior) or amplitude c (singular)
  int bisection_iters = 0;
  ShootClass classification = ShootClass::Decaying;
  // Classes of the final bracket endpoints of the first shooting stage.
  ShootClass lower_class = ShootClass::Decaying;
  ShootClass upper_class = ShootClass::Decaying;
  int stages = 0;
};

// ---------------------------------------------------------------------------
// 1-D profile and ratio flow

struct Profile1dOptions {
  bool adaptive = true;  // false: exactly one Dormand-Prince step per output interval
  ode::Tolerances tol{};
};

/// Solves v' = m^{1/(p-1)}, m' = lambda v^{p-1}, m(t0) = (s0 v0)^{p-1} on
/// `steps` uniform intervals of [t0, t1].
inline RadialProfile eigen_profile_1d(double lambda, double p, double v0, double s0, double t0, double t1,
                                      std::size_t steps, const Profile1dOptions& opt = {}) {
  require(p > 1.0, ErrorKind::Domain, "eigen profile needs p > 1");
  require(lambda >= 0.0, ErrorKind::Domain, "eigen profile needs lambda >= 0");
  require(v0 > 0.0, ErrorKind::Domain, "eigen profile needs v0 > 0");
  require(s0 >= 0.0, ErrorKind::Domain, "eigen profile needs s0 >= 0 (monotone regime)");
  require(t1 > t0 && steps > 0, ErrorKind::Domain, "eigen profile needs t1 > t0 and steps > 0");

  const double inv = 1.0 / (p - 1.0);
  auto rhs = [=](double, const ode::State<2>& y, ode::State<2>& dy) {
    dy[0] = signed_pow(y[1], inv);
    dy[1] = lambda * signed_pow(y[0], p - 1.0);
  };
  ode::State<2> y{v0, std::pow(s0 * v0, p - 1.0)};
  std::vector<double> t(steps + 1), lv(steps + 1), dl(steps + 1);
  ode::Integrator<2> integrator(opt.tol);
  double tc = t0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double tk = k == steps ? t1 : t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(steps);
    if (k > 0) {
      if (opt.adaptive) {
        integrator.advance(rhs, tc, y, tk);
      } else {
        y = ode::fixed_step<2>(rhs, tc, y, tk, 1);
        tc = tk;
      }
    }
    require(y[0] > 0.0, ErrorKind::NotPositive, "1-D profile lost positivity");
    t[k] = tk;
    lv[k] = std::log(y[0]);
    dl[k] = signed_pow(y[1], inv) / y[0];
  }
  std::ostringstream meta;
  meta << "eigen_profile_1d lambda=" << csv::number(lambda) << " p=" << csv::number(p) << " v0=" << csv::number(v0)
       << " s0=" << csv::number(s0);
  return RadialProfile(std::move(t), std::move(lv), std::move(dl), meta.str());
}

struct RatioCurve {
  std::vector<double> t;
  std::vector<double> s;
};

/// Ratio s = v'/v of the 1-D profile: (p-1)s^{p-2}s' + (p-1)s^p = lambda,
/// i.e. s' = lambda s^{2-p}/(p-1) - s^2. Sampled at `samples` uniform points.
inline RatioCurve riccati_ratio_flow(double lambda, double p, double s0, double t0, double t1,
                                     std::size_t samples = 101, ode::Tolerances tol = {}) {
  require(p > 1.0 && lambda > 0.0, ErrorKind::Domain, "ratio flow needs p > 1 and lambda > 0");
  require(s0 > 0.0, ErrorKind::Domain, "ratio flow needs s0 > 0");
  require(samples >= 2 && t1 != t0, ErrorKind::Domain, "ratio flow needs a nonempty span");
  const double alpha = eigen_rate_alpha(lambda, p);
  const double floor = 1e-12 * alpha;
  auto rhs = [=](double, const ode::State<1>& y, ode::State<1>& dy) {
    const double s = std::max(y[0], floor);
    dy[0] = lambda * std::pow(s, 2.0 - p) / (p - 1.0) - y[0] * y[0];
  };
  RatioCurve out;
  out.t.resize(samples);
  out.s.resize(samples);
  ode::State<1> y{s0};
  ode::Integrator<1> integrator(tol);
  double tc = t0;
  bool singular = false;
  auto watch = [&](double, const ode::State<1>& st) {
    singular = st[0] <= floor;
    return !singular;
  };
  for (std::size_t k = 0; k < samples; ++k) {
    const double tk = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(samples - 1);
    if (k > 0) integrator.advance(rhs, tc, y, tk, watch);
    if (singular) {
      throw Error(ErrorKind::SingularRatio, "ratio reached 0 near t=" + csv::number(tc));
    }
    out.t[k] = tk;
    out.s[k] = y[0];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exterior eigenfunction by marching bisection

struct ExteriorOptions {
  std::size_t samples = 2001;
  std::optional<std::pair<double, double>> bracket;  // ratio bracket; default [-10 alpha, 0]
  ode::Tolerances tol{};
  int max_bisection = 200;
  double bracket_width = 1e-14;
  // A stage is trusted up to the last grid node where the two bracket
  // trajectories agree to `agreement` (relative) and the normalised solution
  // is still above `stage_floor`.
  double agreement = 1e-9;
  double stage_floor = 1e-3;
};

namespace radial_detail {

struct Trial {
  ShootClass cls = ShootClass::Decaying;
  std::vector<ode::State<2>> states;  // recorded at grid nodes start, start+1, ...
};

struct ExteriorSystem {
  int n;
  double p;
  double lambda;

  double du(double r, double m) const { return signed_pow(m / std::pow(r, n - 1), 1.0 / (p - 1.0)); }

  void operator()(double r, const ode::State<2>& y, ode::State<2>& dy) const {
    dy[0] = du(r, y[1]);
    dy[1] = lambda * std::pow(r, n - 1) * signed_pow(y[0], p - 1.0);
  }
};

inline Trial run_trial(const ExteriorSystem& sys, const std::vector<double>& grid, std::size_t start, double ratio,
                       double horizon, const ode::Tolerances& tol) {
  Trial trial;
  const double r0 = grid[start];
  ode::State<2> y{1.0, std::pow(r0, sys.n - 1) * signed_pow(ratio, sys.p - 1.0)};
  trial.states.push_back(y);
  if (!(y[1] < 0.0)) {
    trial.cls = ShootClass::BlowUp;
    return trial;
  }
  auto classify = [&](double, const ode::State<2>& st) {
    if (st[0] <= kZeroBarrier) {
      trial.cls = ShootClass::HitZero;
    } else if (st[1] >= 0.0 || st[0] > kOverflowBarrier) {
      // Once the flux is nonnegative it increases for ever: u turns upward.
      trial.cls = ShootClass::BlowUp;
    }
    return trial.cls == ShootClass::Decaying;
  };
  ode::Integrator<2> integrator(tol);
  double r = r0;
  for (std::size_t k = start + 1; k < grid.size(); ++k) {
    if (integrator.advance(sys, r, y, grid[k], classify) == ode::Outcome::Stopped) return trial;
    trial.states.push_back(y);
  }
  const double r_end = grid.back() + horizon;
  while (r < r_end) {
    const double next = std::min(r_end, r + 1.0);
    if (integrator.advance(sys, r, y, next, classify) == ode::Outcome::Stopped) return trial;
  }
  return trial;
}

}  // namespace radial_detail

/// Decaying positive solution of -Delta_p u = -lambda u^{p-1} outside B_{r0},
/// isolated by bisection on the initial ratio u'(r0)/u(r0). Exponential
/// dichotomy limits one bisection to a finite stretch, so the shoot is
/// restarted (re-bisected) from the last trusted node until r_max is reached.
inline ShootResult radial_exterior_eigen(int n, double p, double lambda, double r0, double r_max,
                                         const ExteriorOptions& opt = {}) {
  require(n >= 2 && p > 1.0, ErrorKind::Domain, "exterior problem needs n >= 2 and p > 1");
  require(lambda > 0.0, ErrorKind::Domain, "exterior problem needs lambda > 0");
  require(r0 > 0.0 && r_max / r0 >= 10.0, ErrorKind::Domain, "exterior problem needs r0 > 0 and r_max >> r0");
  const double alpha = eigen_rate_alpha(lambda, p);
  const auto grid = log_grid(r0, r_max, opt.samples);
  const radial_detail::ExteriorSystem sys{n, p, lambda};
  const double lo0 = opt.bracket ? opt.bracket->first : -10.0 * alpha;
  const double hi0 = opt.bracket ? opt.bracket->second : 0.0;
  const double horizon = 80.0 / alpha;

  std::vector<double> log_u(grid.size(), 0.0), dlog(grid.size(), 0.0);
  ShootResult result;
  std::size_t start = 0;
  while (true) {
    auto t_lo = radial_detail::run_trial(sys, grid, start, lo0, horizon, opt.tol);
    auto t_hi = radial_detail::run_trial(sys, grid, start, hi0, horizon, opt.tol);
    if (t_lo.cls == t_hi.cls) {
      throw Error(ErrorKind::NoSeparatrix, "bracket endpoints both classify as " +
                                               std::string(to_string(t_lo.cls)) + " at r=" +
                                               csv::number(grid[start]));
    }
    double lo = lo0, hi = hi0;
    const ShootClass lo_cls = t_lo.cls;
    for (int it = 0; it < opt.max_bisection; ++it) {
      if (std::abs(hi - lo) <= opt.bracket_width * std::max(1.0, std::abs(lo))) break;
      const double mid = lo + 0.5 * (hi - lo);
      if (mid == lo || mid == hi) break;
      auto t_mid = radial_detail::run_trial(sys, grid, start, mid, horizon, opt.tol);
      ++result.bisection_iters;
      if (t_mid.cls == ShootClass::Decaying) {
        t_lo = t_mid;
        t_hi = std::move(t_mid);
        lo = hi = mid;
        break;
      }
      if (t_mid.cls == lo_cls) {
        lo = mid;
        t_lo = std::move(t_mid);
      } else {
        hi = mid;
        t_hi = std::move(t_mid);
      }
    }
    const double ratio = 0.5 * (lo + hi);
    if (result.stages == 0) {
      result.shoot_param = ratio;
      result.lower_class = t_lo.cls;
      result.upper_class = t_hi.cls;
    }
    ++result.stages;
    dlog[start] = ratio;

    const std::size_t common = std::min(t_lo.states.size(), t_hi.states.size());
    std::size_t end = start;
    for (std::size_t j = 1; j < common; ++j) {
      const double ul = t_lo.states[j][0], uh = t_hi.states[j][0];
      const double um = 0.5 * (ul + uh);
      if (!(um > opt.stage_floor) || std::abs(ul - uh) > opt.agreement * um) break;
      const double mm = 0.5 * (t_lo.states[j][1] + t_hi.states[j][1]);
      const std::size_t node = start + j;
      log_u[node] = log_u[start] + std::log(um);
      dlog[node] = sys.du(grid[node], mm) / um;
      end = node;
    }
    if (end + 1 == grid.size()) break;
    if (end == start) {
      throw Error(ErrorKind::NoSeparatrix, "shooting made no progress from r=" + csv::number(grid[start]) +
                                               " (grid too coarse or span too short)");
    }
    start = end;
  }

  std::ostringstream meta;
  meta << "radial_exterior_eigen n=" << n << " p=" << csv::number(p) << " lambda=" << csv::number(lambda)
       << " r0=" << csv::number(r0) << " r_max=" << csv::number(r_max);
  result.profile = RadialProfile(grid, std::move(log_u), std::move(dlog), meta.str());
  result.classification = ShootClass::Decaying;
  return result;
}

// ---------------------------------------------------------------------------
// Two-weight power solutions

/// Max over r of the normalised residual of
///   -(r^{n-1-ap}|u'|^{p-2}u')' - mu r^{n-1-(a+1)p} u^{p-1}
/// for u = r^{-gamma}, with closed-form flux and flux derivative.
inline double hardy_power_residual(int n, double p, double a, double mu, double gamma,
                                   const std::vector<double>& r_samples) {
  require(!r_samples.empty(), ErrorKind::Domain, "need at least one radius");
  // flux m(r) = -|gamma|^{p-2} gamma r^e,  e = n-1-ap-(gamma+1)(p-1)
  const double coeff = -signed_pow(gamma, p - 1.0);
  const double e = n - 1.0 - a * p - (gamma + 1.0) * (p - 1.0);
  const double weight_exp = n - 1.0 - (a + 1.0) * p;
  const double norm_exp = weight_exp - (p - 1.0) * gamma;
  double worst = 0.0;
  for (double r : r_samples) {
    require(r > 0.0, ErrorKind::Domain, "radii must be positive");
    const double dm = coeff * e * std::pow(r, e - 1.0);
    const double potential = mu * std::pow(r, weight_exp) * std::pow(r, -gamma * (p - 1.0));
    const double res = (-dm - potential) / std::pow(r, norm_exp);
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

/// Same residual for an arbitrary sampled profile, using its stored derivative
/// and a centred difference of the flux in ln r. Used for rescaling checks.
inline double hardy_profile_residual(int n, double p, double a, double mu, const RadialProfile& prof) {
  require(prof.size() >= 3, ErrorKind::Domain, "need at least three samples");
  const double flux_exp = n - 1.0 - a * p;
  const double weight_exp = n - 1.0 - (a + 1.0) * p;
  std::vector<double> m(prof.size());
  for (std::size_t i = 0; i < prof.size(); ++i)
    m[i] = std::pow(prof.r(i), flux_exp) * signed_pow(prof.du(i), p - 1.0);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < prof.size(); ++i) {
    const double r = prof.r(i);
    const double dm = (m[i + 1] - m[i - 1]) / (std::log(prof.r(i + 1)) - std::log(prof.r(i - 1))) / r;
    const double scale = std::pow(r, weight_exp) * std::pow(prof.u(i), p - 1.0);
    worst = std::max(worst, std::abs((-dm - mu * scale) / scale));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Singular profile at the origin

struct SingularOptions {
  std::size_t samples = 2001;
  double amplitude = 1.0;  // c in u ~ c r^{-gamma1}
  ode::Tolerances tol{};
};

/// Largest start radius at which the leading-order start u = c r^{-gamma1}
/// carries a relative correction below `rel`; +inf when no perturbation acts.
inline double singular_start_radius(const ProblemParams& params, double c = 1.0, double rel = 1e-8) {
  const auto roots = indicial_roots(params);
  double r = std::numeric_limits<double>::infinity();
  const int active = (params.lambda > 0.0 ? 1 : 0) +
                     (params.nonlinearity && params.nonlinearity->amplitude != 0.0 ? 1 : 0);
  if (active == 0) return r;
  const double share = rel / active;
  if (params.lambda > 0.0) r = std::min(r, std::pow(share / params.lambda, 1.0 / params.p));
  if (params.nonlinearity && params.nonlinearity->amplitude != 0.0) {
    const double q = params.nonlinearity->q;
    const double coef = std::abs(params.nonlinearity->amplitude) * std::pow(c, q - params.p);
    const double expo = params.p - roots.gamma1 * (q - params.p);
    r = std::min(r, std::pow(share / coef, 1.0 / expo));
  }
  return r;
}

/// Integrates the radial form of
///   -Delta_p u - mu u^{p-1}/|x|^p + lambda u^{p-1} = A u^{q-1}
/// outward from r_in in t = ln r, starting from u = c r^{-gamma1}.
inline ShootResult shoot_singular_profile(const ProblemParams& params, double r_in, double r_out,
                                          const SingularOptions& opt = {}) {
  params.validate();
  require(r_in > 0.0 && r_in < r_out, ErrorKind::Domain, "singular shoot needs 0 < r_in < r_out");
  require(params.a == 0.0, ErrorKind::Domain, "singular shoot is posed for a = 0");
  require(params.lambda >= 0.0, ErrorKind::Domain, "singular shoot needs lambda >= 0");
  require(opt.amplitude > 0.0, ErrorKind::Domain, "start amplitude must be positive");
  const auto roots = indicial_roots(params);
  require(params.mu >= 0.0 && params.mu < roots.mu_bar, ErrorKind::Domain, "singular shoot needs 0 <= mu < mu_bar");

  const int n = params.n;
  const double p = params.p, mu = params.mu, lambda = params.lambda;
  const double q = params.nonlinearity ? params.nonlinearity->q : 0.0;
  const double amp = params.nonlinearity ? params.nonlinearity->amplitude : 0.0;
  const double g1 = roots.gamma1;
  const double inv = 1.0 / (p - 1.0);

  auto du_of = [=](double r, double m) { return signed_pow(m / std::pow(r, n - 1), inv); };
  auto rhs = [=](double t, const ode::State<2>& y, ode::State<2>& dy) {
    const double r = std::exp(t);
    const double up = signed_pow(y[0], p - 1.0);
    double src = lambda * up - mu * up / std::pow(r, p);
    if (amp != 0.0) src -= amp * signed_pow(y[0], q - 1.0);
    dy[0] = r * du_of(r, y[1]);
    dy[1] = std::pow(r, n) * src;
  };

  const auto grid = log_grid(r_in, r_out, opt.samples);
  const double c = opt.amplitude;
  const double u0 = c * std::pow(r_in, -g1);
  const double du0 = -g1 * c * std::pow(r_in, -g1 - 1.0);
  ode::State<2> y{u0, std::pow(r_in, n - 1) * signed_pow(du0, p - 1.0)};

  std::vector<double> lu(grid.size()), dl(grid.size());
  ShootClass cls = ShootClass::Decaying;
  auto watch = [&](double, const ode::State<2>& st) {
    if (st[0] <= kZeroBarrier) cls = ShootClass::HitZero;
    else if (st[0] > kOverflowBarrier) cls = ShootClass::BlowUp;
    return cls == ShootClass::Decaying;
  };
  ode::Integrator<2> integrator(opt.tol);
  double t = std::log(r_in);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0) {
      try {
        integrator.advance(rhs, t, y, std::log(grid[k]), watch);
      } catch (const Error& e) {
        // step collapse while u runs away is a finite-r singularity
        if (e.kind() == ErrorKind::StepFailure && y[0] > 1e6 * u0)
          throw Error(ErrorKind::BlowUp, "solution blew up near r=" + csv::number(std::exp(t)) + " (" + e.what() + ")");
        throw;
      }
    }
    if (cls == ShootClass::HitZero)
      throw Error(ErrorKind::HitZero, "solution crossed zero near r=" + csv::number(std::exp(t)));
    if (cls == ShootClass::BlowUp)
      throw Error(ErrorKind::BlowUp, "solution exceeded the overflow barrier near r=" + csv::number(std::exp(t)));
    lu[k] = std::log(y[0]);
    dl[k] = du_of(grid[k], y[1]) / y[0];
  }
  std::ostringstream meta;
  meta << "shoot_singular_profile n=" << n << " p=" << csv::number(p) << " mu=" << csv::number(mu)
       << " lambda=" << csv::number(lambda) << " q=" << csv::number(q) << " A=" << csv::number(amp)
       << " gamma1=" << csv::number(g1) << " c=" << csv::number(c);
  ShootResult res;
  res.profile = RadialProfile(grid, std::move(lu), std::move(dl), meta.str());
  res.shoot_param = c;
  res.classification = ShootClass::Decaying;
  res.stages = 1;
  return res;
}

// ---------------------------------------------------------------------------
// Asymptotic fits and gradient ratios

struct DecayFit {
  double rate = 0.0;
  double power = 0.0;
  double c = 0.0;
  double rms = 0.0;
  std::size_t samples = 0;
};

/// Least-squares fit of ln u = -rate r - power ln r + c over [window_lo,
/// window_hi] (default: [r_max/2, r_max]). With `alpha` set, the rate is held
/// at alpha and only (power, c) are fitted.
inline DecayFit fit_decay_exponents(const RadialProfile& profile, std::optional<double> alpha = std::nullopt,
                                    std::optional<std::pair<double, double>> window = std::nullopt) {
  require(!profile.empty(), ErrorKind::IllConditioned, "empty profile");
  const double lo = window ? window->first : 0.5 * profile.r_max();
  const double hi = window ? window->second : profile.r_max();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < profile.size(); ++i)
    if (profile.r(i) >= lo && profile.r(i) <= hi) idx.push_back(i);
  require(idx.size() >= 10, ErrorKind::IllConditioned,
          "fitting window holds " + std::to_string(idx.size()) + " samples (< 10)");
  const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
  const int cols = alpha ? 2 : 3;
  Eigen::MatrixXd A(m, cols);
  Eigen::VectorXd y(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double r = profile.r(idx[static_cast<std::size_t>(k)]);
    const double lu = profile.log_u()[idx[static_cast<std::size_t>(k)]];
    int c = 0;
    if (!alpha) A(k, c++) = -r;
    A(k, c++) = -std::log(r);
    A(k, c) = 1.0;
    y(k) = alpha ? lu + *alpha * r : lu;
  }
  // Column equilibration before QR; r and ln r are strongly collinear on short windows.
  Eigen::VectorXd scale = A.colwise().norm().transpose();
  for (int c = 0; c < cols; ++c) A.col(c) /= scale(c);
  Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
  coef = coef.cwiseQuotient(scale);
  for (int c = 0; c < cols; ++c) A.col(c) *= scale(c);
  const Eigen::VectorXd resid = A * coef - y;

  DecayFit fit;
  int c = 0;
  fit.rate = alpha ? *alpha : coef(c++);
  fit.power = coef(c++);
  fit.c = coef(c);
  fit.rms = std::sqrt(resid.squaredNorm() / static_cast<double>(m));
  fit.samples = idx.size();
  return fit;
}

enum class RatioMode { Scaled, Plain };

/// Scaled: r|u'|/u. Plain: |u'|/u.
inline std::vector<std::pair<double, double>> gradient_ratio_curve(const RadialProfile& profile, RatioMode mode) {
  std::vector<std::pair<double, double>> out;
  out.reserve(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double ratio = std::abs(profile.dlog_u()[i]);
    out.emplace_back(profile.r(i), mode == RatioMode::Scaled ? profile.r(i) * ratio : ratio);
  }
  return out;
}

}  // namespace plap
