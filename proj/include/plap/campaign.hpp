#pragma once

// Verification campaigns behind the `plap` command: each step runs library
// code against an oracle or invariant, writes its CSV artifacts, and returns
// check rows. Steps are independent; --parallel runs them concurrently and the
// report keeps step order.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <future>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "plap/blowup.hpp"
#include "plap/config.hpp"
#include "plap/csv.hpp"
#include "plap/error.hpp"
#include "plap/field.hpp"
#include "plap/grid_pde.hpp"
#include "plap/indicial.hpp"
#include "plap/params.hpp"
#include "plap/profile.hpp"
#include "plap/radial_ode.hpp"
#include "plap/report.hpp"

namespace plap {

// ---------------------------------------------------------------------------
// logging

inline std::shared_ptr<spdlog::logger> logger() {
  static auto logger = [] {
    auto l = spdlog::get("plap");
    if (!l) l = spdlog::stderr_color_mt("plap");
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::info);
    return l;
  }();
  return logger;
}

/// Applies PLAP_LOG (error | info | debug; unset means info).
inline void configure_logging() {
  const char* env = std::getenv("PLAP_LOG");
  const std::string v = env ? env : "info";
  if (v == "error") logger()->set_level(spdlog::level::err);
  else if (v == "info") logger()->set_level(spdlog::level::info);
  else if (v == "debug") logger()->set_level(spdlog::level::debug);
  else throw Error(ErrorKind::Config, "PLAP_LOG must be one of error, info, debug (got '" + v + "')");
}

// ---------------------------------------------------------------------------
// steps

struct StepContext {
  std::filesystem::path out;
  std::string file_prefix;  // prepended to every artifact name
  std::uint64_t seed = 0;

  std::string path(const std::string& name) const { return (out / (file_prefix + name)).string(); }
};

struct Step {
  std::string name;
  std::function<std::vector<CheckRow>(const StepContext&)> run;
};

namespace campaign_detail {

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

inline std::string fmt_h(double h) {
  const double inv = 1.0 / h;
  if (std::abs(inv - std::round(inv)) < 1e-9) return std::to_string(static_cast<long long>(std::round(inv)));
  return csv::number(h);
}

// Monotone decrease count: number of k with d[k+1] >= d[k].
inline double increases(const std::vector<double>& d) {
  double c = 0.0;
  for (std::size_t k = 1; k < d.size(); ++k)
    if (!(d[k] < d[k - 1])) c += 1.0;
  return c;
}

inline double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace campaign_detail

/// Random admissible (n, p, a, mu <= mu_bar): n in 2..8, p in (1.1, n - 0.05),
/// a in [-1, 2], mu uniform on [mu_bar - (2 mu_bar + 1), mu_bar]. With
/// `edges`, 2% of draws sit on the critical weight and 2% on the double root.
inline ProblemParams random_admissible(std::mt19937_64& rng, bool p_is_two = false, bool edges = true) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  ProblemParams P;
  P.n = p_is_two ? 3 + static_cast<int>(U(rng) * 6.0) : 2 + static_cast<int>(U(rng) * 7.0);
  P.p = p_is_two ? 2.0 : 1.1 + U(rng) * (P.n - 0.05 - 1.1);
  const double kind = U(rng);
  if (edges && !p_is_two && kind < 0.02) {
    P.a = (P.n - P.p) / P.p;
    P.mu = -2.0 * U(rng);
    return P;
  }
  P.a = -1.0 + 3.0 * U(rng);
  const double mb = hardy_best_constant(P.n, P.p, P.a);
  P.mu = (edges && !p_is_two && kind < 0.04) ? mb : mb - U(rng) * (2.0 * mb + 1.0);
  return P;
}

/// p = 2 roots of gamma^2 - K gamma + mu = 0, computed without cancellation.
inline std::pair<double, double> quadratic_roots(double K, double mu) {
  const double disc = std::max(0.0, K * K - 4.0 * mu);
  const double q = 0.5 * (K + std::copysign(std::sqrt(disc), K));
  if (q == 0.0) return {0.0, 0.0};
  const double r1 = q, r2 = mu / q;
  return {std::min(r1, r2), std::max(r1, r2)};
}

inline double relative_root_residual(const ProblemParams& P, double gamma) {
  return std::abs(auxiliary_f(gamma, P.n, P.p, P.a) - P.mu) / std::max(1.0, std::abs(P.mu));
}

// -- indicial --------------------------------------------------------------

inline std::vector<CheckRow> indicial_sweep(const StepContext& ctx, const std::string& prefix, std::size_t trials) {
  auto rng = campaign_detail::make_rng(ctx.seed, 1);
  csv::Writer w(ctx.path("roots_sweep.csv"));
  w.comment("random admissible indicial instances; residual is |f(gamma)-mu|/max(1,|mu|)");
  w.header({"n", "p", "a", "mu", "gamma1", "gamma2", "residual1", "residual2", "placement_ok"});
  double worst = 0.0, fails = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    const auto P = random_admissible(rng);
    const auto d = indicial_roots(P);
    const double r1 = relative_root_residual(P, d.gamma1), r2 = relative_root_residual(P, d.gamma2);
    const bool ok = placement_satisfied(d);
    worst = std::max({worst, r1, r2});
    if (!ok) fails += 1.0;
    w.row({static_cast<double>(P.n), P.p, P.a, P.mu, d.gamma1, d.gamma2, r1, r2, ok ? 1.0 : 0.0});
  }

  auto rng2 = campaign_detail::make_rng(ctx.seed, 2);
  csv::Writer w2(ctx.path("roots_p2_oracle.csv"));
  w2.comment("p = 2 instances against the quadratic formula");
  w2.header({"n", "a", "mu", "gamma1", "gamma2", "oracle1", "oracle2", "rel_diff"});
  double diff = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    const auto P = random_admissible(rng2, true);
    const auto d = indicial_roots(P);
    const auto [o1, o2] = quadratic_roots(P.n - (P.a + 1.0) * 2.0, P.mu);
    const double e = std::max(std::abs(d.gamma1 - o1) / std::max(1.0, std::abs(o1)),
                              std::abs(d.gamma2 - o2) / std::max(1.0, std::abs(o2)));
    diff = std::max(diff, e);
    w2.row({static_cast<double>(P.n), P.a, P.mu, d.gamma1, d.gamma2, o1, o2, e});
  }
  logger()->info("{}: {} indicial instances, worst residual {:.3e}", prefix, trials, worst);
  return {check(prefix + ".max_residual", Comparison::Abs, 0.0, worst, 1e-12, "relative to max(1,|mu|)"),
          check(prefix + ".placement_failures", Comparison::Abs, 0.0, fails, 0.0),
          check(prefix + ".p2_oracle_max_diff", Comparison::Abs, 0.0, diff, 1e-12, "relative to max(1,|gamma|)")};
}

inline std::vector<CheckRow> hardy_sweep(const StepContext& ctx, const std::string& prefix, std::size_t trials,
                                         double perturbation) {
  auto rng = campaign_detail::make_rng(ctx.seed, 3);
  const auto radii = log_grid(0.1, 10.0, 9);
  csv::Writer w(ctx.path("hardy_sweep.csv"));
  w.comment("power solutions r^-gamma at the indicial roots and at roots moved away from gamma* by " +
            csv::number(perturbation));
  w.header({"n", "p", "a", "mu", "gamma1", "gamma2", "residual", "perturbed_residual"});
  double worst = 0.0, least = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trials; ++k) {
    // simple roots only: at a double root the perturbed residual is quadratic
    const auto P = random_admissible(rng, false, false);
    const auto d = indicial_roots(P);
    const double scale = std::max(1.0, std::abs(P.mu));
    const double r = std::max(hardy_power_residual(P.n, P.p, P.a, P.mu, d.gamma1, radii),
                              hardy_power_residual(P.n, P.p, P.a, P.mu, d.gamma2, radii)) /
                     scale;
    const double rp = std::min(hardy_power_residual(P.n, P.p, P.a, P.mu, d.gamma1 - perturbation, radii),
                               hardy_power_residual(P.n, P.p, P.a, P.mu, d.gamma2 + perturbation, radii));
    worst = std::max(worst, r);
    least = std::min(least, rp);
    w.row({static_cast<double>(P.n), P.p, P.a, P.mu, d.gamma1, d.gamma2, r, rp});
  }
  return {check(prefix + ".max_residual", Comparison::Abs, 0.0, worst, 1e-12, "relative to max(1,|mu|)"),
          check(prefix + ".min_perturbed_residual", Comparison::Lower, 1e-3, least, 0.0)};
}

inline std::vector<CheckRow> roots_instance(const ProblemParams& P) {
  const auto d = indicial_roots(P);
  std::vector<CheckRow> rows;
  const double tol = 1e-12 * std::max(1.0, std::abs(P.mu));
  if (P.p == 2.0 && !d.double_root) {
    const auto [o1, o2] = quadratic_roots(P.n - (P.a + 1.0) * 2.0, P.mu);
    rows.push_back(check("roots.gamma1", Comparison::Abs, o1, d.gamma1, 1e-12 * std::max(1.0, std::abs(o1)),
                         "quadratic formula"));
    rows.push_back(check("roots.gamma2", Comparison::Abs, o2, d.gamma2, 1e-12 * std::max(1.0, std::abs(o2)),
                         "quadratic formula"));
  } else {
    rows.push_back(check("roots.gamma1_residual", Comparison::Abs, P.mu, auxiliary_f(d.gamma1, P.n, P.p, P.a), tol,
                         "f(gamma1) = mu; gamma1 = " + csv::number(d.gamma1)));
    rows.push_back(check("roots.gamma2_residual", Comparison::Abs, P.mu, auxiliary_f(d.gamma2, P.n, P.p, P.a), tol,
                         "f(gamma2) = mu; gamma2 = " + csv::number(d.gamma2)));
  }
  rows.push_back(check("roots.placement", Comparison::Abs, 1.0, placement_satisfied(d) ? 1.0 : 0.0, 0.0,
                       std::string(to_string(d.placement))));
  return rows;
}

// -- radial ----------------------------------------------------------------

struct DecayTolerances {
  double rate = 1e-3;
  double power = 5e-2;
};

/// Exterior eigenfunction, fitted on [r_max/2, r_max] and optionally on a second
/// window; for p = 2 the profile is also compared with r^{-ν} K_ν(√λ r).
inline std::vector<CheckRow> exterior_decay(const StepContext& ctx, const std::string& prefix, int n, double p,
                                            double lambda, const ShootBlock& blk, DecayTolerances tol,
                                            bool second_window, const std::string& file) {
  ExteriorOptions opt;
  opt.samples = blk.samples;
  const auto res = radial_exterior_eigen(n, p, lambda, blk.r0, blk.r_max, opt);
  res.profile.write_csv(ctx.path(file + "_profile.csv"));
  const double alpha = eigen_rate_alpha(lambda, p);
  const double power = (n - 1.0) / (p * (p - 1.0));
  std::vector<CheckRow> rows;

  csv::Writer w(ctx.path(file + "_fit.csv"));
  w.comment("fit ln u = -rate r - power ln r + c; alpha=" + csv::number(alpha) + " power=" + csv::number(power));
  w.header({"window_lo", "window_hi", "rate", "power", "c", "rms", "samples"});
  std::vector<std::pair<double, double>> windows{{0.5 * blk.r_max, blk.r_max}};
  if (second_window) windows.emplace_back(blk.window2[0] * blk.r_max, blk.window2[1] * blk.r_max);
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const auto fit = fit_decay_exponents(res.profile, std::nullopt, windows[k]);
    w.row({windows[k].first, windows[k].second, fit.rate, fit.power, fit.c, fit.rms,
           static_cast<double>(fit.samples)});
    const std::string tag = second_window ? "_window" + std::to_string(k + 1) : "";
    rows.push_back(check(prefix + ".rate" + tag, Comparison::Abs, alpha, fit.rate, tol.rate));
    rows.push_back(check(prefix + ".power" + tag, Comparison::Abs, power, fit.power, tol.power));
  }

  if (p == 2.0 && std::sqrt(lambda) * blk.r_max < 600.0) {
    const double nu = 0.5 * (n - 2.0), k = std::sqrt(lambda);
    auto log_exact = [&](double r) { return -nu * std::log(r) + std::log(std::cyl_bessel_k(nu, k * r)); };
    const double base = log_exact(blk.r0);
    double err = 0.0;
    for (std::size_t i = 0; i < res.profile.size(); ++i) {
      const double r = res.profile.r(i);
      err = std::max(err, std::abs(res.profile.log_u()[i] - (log_exact(r) - base)));
    }
    rows.push_back(check(prefix + ".bessel_log_error", Comparison::Abs, 0.0, err, 1e-7,
                         "max |ln u - ln u_exact| with u(r0) = 1"));
  }
  logger()->debug("{}: exterior shoot n={} p={} used {} stages, {} bisections", prefix, n, p, res.stages,
               res.bisection_iters);
  return rows;
}

inline std::vector<CheckRow> martin_check(const StepContext& ctx, const std::string& prefix, int n, double p,
                                          double lambda, const MartinBlock& blk) {
  require(static_cast<int>(blk.x.size()) == n, ErrorKind::Domain, "martin point must have dimension n");
  const Direction xi = Direction::normalized(blk.xi);
  double xn = 0.0;
  for (double c : blk.x) xn += c * c;
  xn = std::sqrt(xn);
  ExteriorOptions opt;
  opt.samples = blk.samples;
  const double r_max = blk.t + xn + 10.0;
  const auto res = radial_exterior_eigen(n, p, lambda, 1.0, r_max, opt);
  const double alpha = eigen_rate_alpha(lambda, p);
  const double target = std::exp(alpha * busemann_limit(blk.x, xi));

  csv::Writer w(ctx.path("martin.csv"));
  w.comment("u(|x - t xi|)/u(t) against exp(alpha <x,xi>) = " + csv::number(target));
  w.header({"t", "estimate", "target", "busemann", "busemann_limit"});
  double estimate = 0.0, bus = 0.0;
  for (double t : {blk.t / 100.0, blk.t / 10.0, blk.t}) {
    if (!(t > xn + 1.0)) continue;
    const double e = martin_kernel_estimate(res.profile, blk.x, xi, t);
    const double b = busemann(blk.x, xi, t);
    w.row({t, e, target, b, busemann_limit(blk.x, xi)});
    estimate = e;
    bus = b;
  }
  return {check(prefix + ".martin_kernel", Comparison::Abs, target, estimate, 5e-3,
                "t=" + csv::number(blk.t)),
          check(prefix + ".busemann", Comparison::Abs, busemann_limit(blk.x, xi), bus, 1e-2,
                "t=" + csv::number(blk.t))};
}

inline std::vector<CheckRow> riccati_check(const StepContext& ctx, const std::string& prefix, const ShootBlock& blk) {
  csv::Writer w(ctx.path("riccati.csv"));
  w.comment("ratio flow s' = lambda s^(2-p)/(p-1) - s^2 from s0 in {alpha/4, 4 alpha}");
  w.header({"p", "lambda", "s0", "T", "s_T", "alpha", "gap", "p2_oracle_diff"});
  double gap = 0.0, oracle = 0.0;
  bool have_p2 = false;
  for (double p : blk.riccati_p)
    for (double lambda : blk.riccati_lambda) {
      const double alpha = eigen_rate_alpha(lambda, p);
      for (double s0 : {0.25 * alpha, 4.0 * alpha}) {
        const auto curve = riccati_ratio_flow(lambda, p, s0, 0.0, blk.riccati_T, 501);
        const double g = std::abs(curve.s.back() - alpha);
        gap = std::max(gap, g);
        double od = std::nan("");
        if (p == 2.0) {
          // s = a tanh(a t + c) below alpha, a coth(a t + c) above
          have_p2 = true;
          od = 0.0;
          for (std::size_t k = 0; k < curve.t.size(); ++k) {
            const double t = curve.t[k];
            double exact;
            if (s0 < alpha) {
              exact = alpha * std::tanh(alpha * t + std::atanh(s0 / alpha));
            } else {
              exact = alpha / std::tanh(alpha * t + std::atanh(alpha / s0));
            }
            od = std::max(od, std::abs(curve.s[k] - exact));
          }
          oracle = std::max(oracle, od);
        }
        w.row({p, lambda, s0, blk.riccati_T, curve.s.back(), alpha, g, od});
      }
    }
  std::vector<CheckRow> rows{check(prefix + ".max_gap", Comparison::Abs, 0.0, gap, 1e-6,
                                   "max |s(T) - alpha| at T=" + csv::number(blk.riccati_T))};
  if (have_p2) rows.push_back(check(prefix + ".p2_oracle_max_diff", Comparison::Abs, 0.0, oracle, 1e-8));
  return rows;
}

// -- blow-up ---------------------------------------------------------------

inline std::vector<CheckRow> blowup_check(const StepContext& ctx, const std::string& prefix, const ProblemParams& P,
                                          const BlowupBlock& blk, bool singular) {
  using campaign_detail::max_of;
  const auto d = indicial_roots(P);
  const double g1 = d.gamma1;
  const double alpha = eigen_rate_alpha(P.lambda, P.p);
  const double beta = (P.n - 1.0) / (P.p * (P.p - 1.0));
  std::vector<CheckRow> rows;

  // exact power: every dilate is the power itself
  const auto [rmin, rmax] = std::minmax_element(blk.radii.begin(), blk.radii.end());
  const auto rg = log_grid(*rmin / blk.origin_window, *rmax * blk.origin_window, 2001);
  const auto power = RadialProfile::sample(
      rg, [&](double r) { return -g1 * std::log(r); }, [&](double r) { return -g1 / r; }, "r^-gamma1");
  const auto origin = rescale_near_zero(power, blk.radii, g1, blk.origin_window, blk.window_samples);
  origin.write_csv(ctx.path("rescale_origin_exact.csv"), "exact r^-gamma1, gamma1=" + csv::number(g1));
  rows.push_back(check(prefix + ".origin_exact", Comparison::Abs, 0.0, max_of(origin.sup_distance), 1e-12,
                       "sup distance"));

  // exact exponential and the radial e^{-alpha r} r^{-beta} profile
  const auto [tmin, tmax] = std::minmax_element(blk.shifts.begin(), blk.shifts.end());
  const double lo = *tmin - blk.translation_window - 1.0, hi = *tmax + blk.translation_window + 1.0;
  const std::size_t count = static_cast<std::size_t>(std::ceil((hi - lo) / 0.01)) + 1;
  std::vector<double> tr(count);
  for (std::size_t i = 0; i < count; ++i) tr[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1.0);
  const auto expo = RadialProfile::sample(
      tr, [&](double r) { return -alpha * r; }, [&](double) { return -alpha; }, "exp(-alpha r)");
  const auto trans = translate_rescale_at_infinity(expo, blk.shifts, alpha, blk.translation_window, blk.window_samples);
  trans.write_csv(ctx.path("rescale_infinity_exact.csv"), "exact exp(-alpha r), alpha=" + csv::number(alpha));
  rows.push_back(check(prefix + ".translation_exact", Comparison::Abs, 0.0, max_of(trans.sup_distance), 1e-12,
                       "sup distance"));

  const auto radial = RadialProfile::sample(
      tr, [&](double r) { return -alpha * r - beta * std::log(r); }, [&](double r) { return -alpha - beta / r; },
      "exp(-alpha r) r^-beta");
  const auto rt = translate_rescale_at_infinity(radial, blk.shifts, alpha, blk.translation_window, blk.window_samples);
  rt.write_csv(ctx.path("rescale_infinity_radial.csv"),
               "exp(-alpha r) r^-beta, alpha=" + csv::number(alpha) + " beta=" + csv::number(beta));
  rows.push_back(check(prefix + ".translation_monotone", Comparison::Abs, 0.0,
                       campaign_detail::increases(rt.sup_distance), 0.0, "non-decreasing steps in t_k"));
  rows.push_back(check(prefix + ".translation_final", Comparison::Upper, 0.0, rt.sup_distance.back(), 1e-2,
                       "sup distance at t=" + csv::number(blk.shifts.back())));

  if (singular) {
    // singular solution near the origin: dilates approach the pure power
    const double r_in = std::min(singular_start_radius(P), *rmin / blk.origin_window);
    const double r_out = *rmax * blk.origin_window * 1.01;
    const auto shot = shoot_singular_profile(P, r_in, r_out);
    shot.profile.write_csv(ctx.path("singular_profile.csv"));
    std::vector<double> radii = blk.radii;
    std::sort(radii.begin(), radii.end(), std::greater<>());
    const auto rep = rescale_near_zero(shot.profile, radii, g1, blk.origin_window, blk.window_samples);
    rep.write_csv(ctx.path("rescale_origin_singular.csv"), shot.profile.meta());
    rows.push_back(check(prefix + ".singular_origin_monotone", Comparison::Abs, 0.0,
                         campaign_detail::increases(rep.sup_distance), 0.0, "non-decreasing steps as R_k -> 0"));
  }
  return rows;
}

// -- grid ------------------------------------------------------------------

struct GridPrefixes {
  std::string convergence = "grid";
  std::string gradient = "grid";
  std::string kappa = "grid";
  bool extras = true;  // directional range and barrier rows
};

inline std::vector<CheckRow> grid_check(const StepContext& ctx, const GridPrefixes& pre, const ProblemParams& P,
                                        const GridBlock& blk) {
  using campaign_detail::fmt_h;
  const double alpha = eigen_rate_alpha(P.lambda, P.p);
  const auto xi = blk.xi;
  auto exact = [&](double x, double y) { return std::exp(alpha * (xi[0] * x + xi[1] * y)); };
  std::vector<CheckRow> rows;
  std::vector<double> errs;
  csv::Writer w(ctx.path("grid_convergence.csv"));
  w.comment("p=" + csv::number(P.p) + " lambda=" + csv::number(P.lambda) + " xi=(" + csv::number(xi[0]) + ";" +
            csv::number(xi[1]) + ")");
  w.header({"h", "sup_error", "grad_log_sup", "max_f", "kappa", "newton_iters", "final_residual", "damping_events"});
  SolveOptions opt;
  opt.max_iters = blk.max_iters;
  for (std::size_t k = 0; k < blk.h.size(); ++k) {
    const double h = blk.h[k];
    const auto sol = solve_dirichlet(P, xi, blk.rect, h, blk.tol, opt);
    const auto& f = sol.field;
    double err = 0.0;
    for (std::size_t j = 0; j < f.grid.ny; ++j)
      for (std::size_t i = 0; i < f.grid.nx; ++i)
        err = std::max(err, std::abs(f(i, j) - exact(f.grid.x(i), f.grid.y(j))));
    errs.push_back(err);
    const double gls = gradient_log_sup(f);
    const auto kb = kappa_bound_check(f, P.p, P.lambda);
    w.row({h, err, gls, kb.max_f, kb.kappa, static_cast<double>(sol.stats.newton_iters), sol.stats.final_residual,
           static_cast<double>(sol.stats.damping_events)});
    logger()->info("grid h=1/{}: sup error {:.3e}, {} Newton steps", fmt_h(h), err, sol.stats.newton_iters);
    rows.push_back(check(pre.gradient + ".gradient_bound_h" + fmt_h(h), Comparison::Upper, alpha + 5.0 * err / h, gls,
                         0.0, "alpha + 5 sup_error/h"));
    if (k + 1 == blk.h.size()) {
      rows.push_back(check(pre.convergence + ".sup_error_h" + fmt_h(h), Comparison::Upper, 0.0, err, 5e-4));
      rows.push_back(check(pre.kappa + ".solve_max_f_over_kappa", Comparison::Upper, 1.0, kb.max_f / kb.kappa, 1e-2,
                           "h=" + csv::number(h)));
      f.write_csv(ctx.path("grid_field.csv"), "solve_dirichlet h=" + csv::number(h));
      f.write_binary(ctx.path("grid_field.plf2"));
      if (pre.extras) {
        const auto dr = directional_range(f, xi);
        rows.push_back(check(pre.convergence + ".directional_inf", Comparison::Abs, alpha, dr.inf, 1e-3, "nu = xi"));
        rows.push_back(check(pre.convergence + ".directional_sup", Comparison::Abs, alpha, dr.sup, 1e-3, "nu = xi"));
        const double diam = std::hypot(blk.rect.x1 - blk.rect.x0, blk.rect.y1 - blk.rect.y0);
        double bmin = std::numeric_limits<double>::infinity(), bmax = 0.0;
        for (std::size_t j = 0; j < f.grid.ny; ++j)
          for (std::size_t i = 0; i < f.grid.nx; ++i)
            if (!f.grid.interior(i, j)) {
              bmin = std::min(bmin, f(i, j));
              bmax = std::max(bmax, f(i, j));
            }
        const bool inside = f.min() >= bmin * std::exp(-alpha * diam) && f.max() <= bmax * std::exp(alpha * diam);
        rows.push_back(check(pre.convergence + ".barrier", Comparison::Abs, 1.0, inside ? 1.0 : 0.0, 0.0,
                             "boundary range widened by exp(alpha diam)"));
      }
    }
  }
  for (std::size_t k = 1; k < errs.size(); ++k) {
    const double order = std::log(errs[k - 1] / errs[k]) / std::log(blk.h[k - 1] / blk.h[k]);
    rows.push_back(check(pre.convergence + ".order_h" + fmt_h(blk.h[k - 1]) + "_h" + fmt_h(blk.h[k]),
                         Comparison::Lower, 1.8, order, 0.0));
  }

  // equality case: the exponential itself
  const auto g = make_grid(blk.rect, blk.h.back());
  const auto ex = Field2D::sample(g, exact);
  const double analytic = gradient_log_sup(g, [&](double, double) { return std::array<double, 2>{alpha * xi[0], alpha * xi[1]}; });
  rows.push_back(check(pre.gradient + ".exact_analytic", Comparison::Abs, alpha, analytic, 1e-10));
  const double h = blk.h.back();
  rows.push_back(check(pre.gradient + ".exact_stencil", Comparison::Abs, alpha, gradient_log_sup(ex), h * h,
                       "tolerance h^2"));
  const auto kb = kappa_bound_check(ex, P.p, P.lambda);
  rows.push_back(check(pre.kappa + ".exact_max_f_over_kappa", Comparison::Abs, 1.0, kb.max_f / kb.kappa, 1e-12));
  return rows;
}

// -- Bochner ---------------------------------------------------------------

inline std::vector<CheckRow> bochner_check(const StepContext& ctx, const std::string& prefix, const BochnerBlock& blk) {
  using campaign_detail::fmt_h;
  csv::Writer w(ctx.path("bochner.csv"));
  w.comment("p=2 lambda=1 field v = exp(x) + exp(y) on [0,1]^2");
  w.header({"h", "max_residual", "evaluated"});
  std::vector<double> res;
  for (double h : blk.h) {
    const auto g = make_grid(Rect{}, h);
    const auto f = Field2D::sample(g, [](double x, double y) { return std::exp(x) + std::exp(y); });
    const auto b = bochner_residual(f, 2.0, 1.0);
    res.push_back(b.max_residual);
    w.row({h, b.max_residual, static_cast<double>(b.evaluated)});
  }
  std::vector<CheckRow> rows;
  for (std::size_t k = 1; k < res.size(); ++k)
    rows.push_back(check(prefix + ".factor_h" + fmt_h(blk.h[k - 1]) + "_h" + fmt_h(blk.h[k]), Comparison::Lower, 1.5,
                         res[k - 1] / res[k], 0.0, "residual ratio per refinement"));
  // exact exponential: every term vanishes
  const auto g = make_grid(Rect{-1.0, -1.0, 1.0, 1.0}, blk.exact_h);
  const auto ex = Field2D::sample(g, [](double x, double y) { return std::exp(0.6 * x + 0.8 * y); });
  rows.push_back(check(prefix + ".exact_exponential", Comparison::Abs, 0.0, bochner_residual(ex, 2.0, 1.0).max_residual,
                       1e-12, "h=" + csv::number(blk.exact_h)));
  return rows;
}

// ---------------------------------------------------------------------------
// campaigns

inline ProblemParams params_or(const ExperimentConfig& cfg, ProblemParams def) {
  return cfg.params ? *cfg.params : def;
}

inline ProblemParams make_params(int n, double p, double a, double mu, double lambda) {
  ProblemParams P;
  P.n = n;
  P.p = p;
  P.a = a;
  P.mu = mu;
  P.lambda = lambda;
  return P;
}

/// Steps of one campaign, in report order.
inline std::vector<Step> campaign_steps(const ExperimentConfig& cfg) {
  const std::string& sub = cfg.subcommand;
  std::vector<Step> steps;
  if (sub == "roots") {
    if (cfg.params) steps.push_back({"roots.instance", [P = *cfg.params](const StepContext&) { return roots_instance(P); }});
    steps.push_back({"roots.sweep", [blk = cfg.roots](const StepContext& c) { return indicial_sweep(c, "roots.sweep", blk.trials); }});
    steps.push_back({"roots.hardy", [blk = cfg.roots](const StepContext& c) {
                       return hardy_sweep(c, "roots.hardy", blk.hardy_trials, blk.perturbation);
                     }});
  } else if (sub == "shoot") {
    const auto P = params_or(cfg, make_params(3, 2.0, 0.0, 0.0, 1.0));
    const DecayTolerances tol = P.p == 2.0 ? DecayTolerances{1e-3, 5e-2} : DecayTolerances{5e-3, 0.1};
    steps.push_back({"shoot.decay", [P, tol, blk = cfg.shoot](const StepContext& c) {
                       return exterior_decay(c, "shoot.decay", P.n, P.p, P.lambda, blk, tol, true, "exterior");
                     }});
    steps.push_back({"shoot.riccati", [blk = cfg.shoot](const StepContext& c) { return riccati_check(c, "shoot.riccati", blk); }});
  } else if (sub == "martin") {
    const auto P = params_or(cfg, make_params(3, 2.0, 0.0, 0.0, 1.0));
    steps.push_back({"martin", [P, blk = cfg.martin](const StepContext& c) {
                       return martin_check(c, "martin", P.n, P.p, P.lambda, blk);
                     }});
  } else if (sub == "blowup") {
    const auto P = params_or(cfg, make_params(3, 2.0, 0.0, 0.1875, 1.0));
    steps.push_back({"blowup", [P, blk = cfg.blowup](const StepContext& c) { return blowup_check(c, "blowup", P, blk, true); }});
  } else if (sub == "grid") {
    const auto P = params_or(cfg, make_params(2, 3.0, 0.0, 0.0, 2.0));
    steps.push_back({"grid", [P, blk = cfg.grid](const StepContext& c) { return grid_check(c, GridPrefixes{}, P, blk); }});
  } else if (sub == "bochner") {
    steps.push_back({"bochner", [blk = cfg.bochner](const StepContext& c) { return bochner_check(c, "bochner", blk); }});
  } else if (sub == "all") {
    const auto& r = cfg.roots;
    steps.push_back({"AC1", [r](const StepContext& c) { return indicial_sweep(c, "AC1", r.trials); }});
    steps.push_back({"AC2-4", [blk = cfg.grid](const StepContext& c) {
                       return grid_check(c, GridPrefixes{"AC2", "AC3", "AC4", false}, make_params(2, 3.0, 0, 0, 2.0), blk);
                     }});
    steps.push_back({"AC5", [blk = cfg.bochner](const StepContext& c) { return bochner_check(c, "AC5", blk); }});
    steps.push_back({"AC6", [s = cfg.shoot, m = cfg.martin](const StepContext& c) {
                       auto rows = exterior_decay(c, "AC6.n3", 3, 2.0, 1.0, s, {1e-3, 5e-2}, false, "n3");
                       auto more = martin_check(c, "AC6", 3, 2.0, 1.0, m);
                       rows.insert(rows.end(), more.begin(), more.end());
                       more = exterior_decay(c, "AC6.n2", 2, 2.0, 1.0, s, {1e-3, 5e-2}, false, "n2");
                       rows.insert(rows.end(), more.begin(), more.end());
                       return rows;
                     }});
    steps.push_back({"AC7", [s = cfg.shoot](const StepContext& c) {
                       return exterior_decay(c, "AC7", 3, 1.5, 0.5, s, {5e-3, 0.1}, true, "p1.5");
                     }});
    steps.push_back({"AC8", [s = cfg.shoot](const StepContext& c) { return riccati_check(c, "AC8", s); }});
    steps.push_back({"AC9", [r](const StepContext& c) { return hardy_sweep(c, "AC9", r.hardy_trials, r.perturbation); }});
    steps.push_back({"AC10", [blk = cfg.blowup](const StepContext& c) {
                       return blowup_check(c, "AC10", make_params(3, 2.0, 0.0, 0.1875, 1.0), blk, false);
                     }});
  } else {
    throw Error(ErrorKind::Config, "unknown subcommand '" + sub + "'");
  }
  return steps;
}

inline std::string describe(const ExperimentConfig& cfg) {
  std::ostringstream s;
  s << "seed " << cfg.seed;
  if (cfg.params) {
    const auto& P = *cfg.params;
    s << " n=" << P.n << " p=" << csv::number(P.p) << " a=" << csv::number(P.a) << " mu=" << csv::number(P.mu)
      << " lambda=" << csv::number(P.lambda);
    if (P.nonlinearity) s << " q=" << csv::number(P.nonlinearity->q) << " A=" << csv::number(P.nonlinearity->amplitude);
  }
  return s.str();
}

/// Runs every step of the configured campaign and writes report.csv and
/// summary.txt into cfg.out. Module errors become failed rows named after the
/// step that raised them.
inline ExperimentReport run(const ExperimentConfig& cfg) {
  require(!cfg.out.empty(), ErrorKind::Config, "no output directory given");
  std::filesystem::create_directories(cfg.out);
  const auto steps = campaign_steps(cfg);
  const StepContext ctx{cfg.out, "", cfg.seed};

  struct Outcome {
    std::vector<CheckRow> rows;
    double seconds = 0.0;
  };
  auto execute = [&ctx](const Step& step) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    logger()->debug("step {} started", step.name);
    try {
      o.rows = step.run(ctx);
    } catch (const Error& e) {
      logger()->error("step {} failed: {}", step.name, e.what());
      o.rows.push_back(failed_check(step.name + ".error", e.what()));
    } catch (const std::exception& e) {
      logger()->error("step {} failed: {}", step.name, e.what());
      o.rows.push_back(failed_check(step.name + ".error", e.what()));
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    logger()->debug("step {} finished in {:.3f} s", step.name, o.seconds);
    return o;
  };

  std::vector<Outcome> outcomes;
  if (cfg.parallel) {
    std::vector<std::future<Outcome>> futures;
    for (const auto& s : steps) futures.push_back(std::async(std::launch::async, execute, std::cref(s)));
    for (auto& f : futures) outcomes.push_back(f.get());
  } else {
    for (const auto& s : steps) outcomes.push_back(execute(s));
  }

  ExperimentReport rep;
  rep.campaign = cfg.subcommand;
  rep.metadata.push_back(describe(cfg));
  for (std::size_t k = 0; k < steps.size(); ++k) {
    rep.rows.insert(rep.rows.end(), outcomes[k].rows.begin(), outcomes[k].rows.end());
    rep.durations.emplace_back(steps[k].name, outcomes[k].seconds);
  }
  rep.write_csv((std::filesystem::path(cfg.out) / "report.csv").string());
  rep.write_summary((std::filesystem::path(cfg.out) / "summary.txt").string());
  for (const auto& r : rep.rows)
    logger()->info("{} {} measured={} target={} tol={}", r.pass ? "PASS" : "FAIL", r.name, csv::number(r.measured),
                csv::number(r.target), csv::number(r.tolerance));
  return rep;
}

}  // namespace plap
