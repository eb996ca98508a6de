#pragma once

// Indicial polynomial of the weighted Hardy problem
//   -div(|x|^{-ap} |grad u|^{p-2} grad u) = mu |x|^{-(a+1)p} u^{p-1}.
// Power solutions |x|^{-gamma} exist iff f(gamma) = mu with
//   f(gamma) = |gamma|^{p-2} gamma (n - (a+1)p - (p-1) gamma).

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "plap/error.hpp"
#include "plap/params.hpp"

namespace plap {

namespace indicial_detail {

inline void check_np(int n, double p) {
  require(n >= 2, ErrorKind::Domain, "dimension n must be >= 2");
  require(p > 1.0 && p < n, ErrorKind::Domain, "exponent p must lie in (1, n)");
}

// n - (a+1)p
inline double weight_gap(int n, double p, double a) { return n - (a + 1.0) * p; }

constexpr double kCriticalWeightTol = 1e-14;
constexpr double kDoubleRootTol = 1e-10;

}  // namespace indicial_detail

/// Which row of the root placement table applies.
enum class Placement {
  SubcriticalNonnegativeMu,    // a < (n-p)/p, mu in [0, mu_bar]
  SubcriticalNegativeMu,       // a < (n-p)/p, mu < 0
  CriticalWeight,              // a = (n-p)/p, mu <= 0
  SupercriticalNonnegativeMu,  // a > (n-p)/p, mu in [0, mu_bar]
  SupercriticalNegativeMu,     // a > (n-p)/p, mu < 0
};

constexpr std::string_view to_string(Placement placement) {
  switch (placement) {
    case Placement::SubcriticalNonnegativeMu: return "subcritical_nonnegative_mu";
    case Placement::SubcriticalNegativeMu: return "subcritical_negative_mu";
    case Placement::CriticalWeight: return "critical_weight";
    case Placement::SupercriticalNonnegativeMu: return "supercritical_nonnegative_mu";
    case Placement::SupercriticalNegativeMu: return "supercritical_negative_mu";
  }
  return "unknown";
}

struct IndicialData {
  double mu_bar = 0.0;      // best Hardy constant
  double gamma_star = 0.0;  // maximiser of f, (n-(a+1)p)/p
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double zero_root = 0.0;   // nonzero zero of f, (n-(a+1)p)/(p-1)
  Placement placement = Placement::SubcriticalNonnegativeMu;
  bool double_root = false;
};

/// |(n-(a+1)p)/p|^p; exactly 0 on the critical weight a = (n-p)/p.
inline double hardy_best_constant(int n, double p, double a) {
  indicial_detail::check_np(n, p);
  if (std::abs(a - (n - p) / p) <= indicial_detail::kCriticalWeightTol) return 0.0;
  return std::pow(std::abs(indicial_detail::weight_gap(n, p, a) / p), p);
}

/// f(gamma); f(0) = 0 by continuity for every p > 1.
inline double auxiliary_f(double gamma, int n, double p, double a) {
  if (gamma == 0.0) return 0.0;
  return signed_pow(gamma, p - 1.0) * (indicial_detail::weight_gap(n, p, a) - (p - 1.0) * gamma);
}

/// f'(gamma) = (p-1)|gamma|^{p-2}(n-(a+1)p - p gamma), defined for gamma != 0.
inline double auxiliary_f_derivative(double gamma, int n, double p, double a) {
  return (p - 1.0) * std::pow(std::abs(gamma), p - 2.0) * (indicial_detail::weight_gap(n, p, a) - p * gamma);
}

inline Placement classify_placement(int n, double p, double a, double mu) {
  const double offset = a - (n - p) / p;
  if (std::abs(offset) <= indicial_detail::kCriticalWeightTol) return Placement::CriticalWeight;
  if (offset < 0.0) {
    return mu >= 0.0 ? Placement::SubcriticalNonnegativeMu : Placement::SubcriticalNegativeMu;
  }
  return mu >= 0.0 ? Placement::SupercriticalNonnegativeMu : Placement::SupercriticalNegativeMu;
}

/// Checks the placement inequalities of `data.placement` with slack `tol`
/// (strict inequalities of the table are tested non-strictly).
inline bool placement_satisfied(const IndicialData& d, double tol = 1e-10) {
  const auto le = [tol](double x, double y) { return x <= y + tol; };
  switch (d.placement) {
    case Placement::SubcriticalNonnegativeMu:
      return le(0.0, d.gamma1) && le(d.gamma1, d.gamma_star) && le(d.gamma_star, d.gamma2) &&
             le(d.gamma2, d.zero_root);
    case Placement::SubcriticalNegativeMu:
      return le(d.gamma1, 0.0) && le(0.0, d.zero_root) && le(d.zero_root, d.gamma2);
    case Placement::CriticalWeight:
      return le(d.gamma1, 0.0) && le(0.0, d.gamma2);
    case Placement::SupercriticalNonnegativeMu:
      return le(d.zero_root, d.gamma1) && le(d.gamma1, d.gamma_star) && le(d.gamma_star, d.gamma2) &&
             le(d.gamma2, 0.0);
    case Placement::SupercriticalNegativeMu:
      return le(d.gamma1, d.zero_root) && le(d.zero_root, 0.0) && le(0.0, d.gamma2);
  }
  return false;
}

namespace indicial_detail {

// Root of f = mu on a monotone branch: `inner` is gamma_star, `outward` is -1
// (increasing branch below gamma_star) or +1 (decreasing branch above it).
inline double branch_root(int n, double p, double a, double mu, double inner, double outward) {
  const auto f = [&](double g) { return auxiliary_f(g, n, p, a); };
  double step = std::max(1.0, std::abs(inner));
  double outer = inner + outward * step;
  for (int i = 0; f(outer) >= mu; ++i) {
    require(i < 2000, ErrorKind::NoRealRoot, "failed to bracket indicial root");
    step *= 2.0;
    outer = inner + outward * step;
  }
  // f(outer) < mu <= f(inner); bisect down to adjacent doubles.
  double lo = std::min(inner, outer);
  double hi = std::max(inner, outer);
  const bool increasing = outward < 0.0;
  for (int i = 0; i < 2200; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const bool below = f(mid) < mu;
    if (below == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double best = std::abs(f(lo) - mu) <= std::abs(f(hi) - mu) ? lo : hi;
  // One Newton polish, kept only if it improves the residual.
  if (best != 0.0) {
    const double df = auxiliary_f_derivative(best, n, p, a);
    if (std::isfinite(df) && df != 0.0) {
      const double polished = best - (f(best) - mu) / df;
      if (std::isfinite(polished) && std::abs(f(polished) - mu) < std::abs(f(best) - mu)) best = polished;
    }
  }
  return best;
}

}  // namespace indicial_detail

/// Both real roots of f(gamma) = mu with placement data.
inline IndicialData indicial_roots(const ProblemParams& params) {
  params.validate();
  const int n = params.n;
  const double p = params.p;
  const double a = params.a;
  const double mu = params.mu;

  IndicialData d;
  d.mu_bar = hardy_best_constant(n, p, a);
  const double gap = indicial_detail::weight_gap(n, p, a);
  d.placement = classify_placement(n, p, a, mu);
  if (d.placement == Placement::CriticalWeight) {
    d.gamma_star = 0.0;
    d.zero_root = 0.0;
  } else {
    d.gamma_star = gap / p;
    d.zero_root = gap / (p - 1.0);
  }

  const double detect = indicial_detail::kDoubleRootTol * std::max(1.0, d.mu_bar);
  if (mu > d.mu_bar + detect) {
    throw Error(ErrorKind::NoRealRoot, "mu=" + std::to_string(mu) + " exceeds the Hardy constant " +
                                           std::to_string(d.mu_bar));
  }
  if (std::abs(mu - d.mu_bar) <= detect) {
    d.double_root = true;
    d.gamma1 = d.gamma2 = d.gamma_star;
    return d;
  }
  d.gamma1 = indicial_detail::branch_root(n, p, a, mu, d.gamma_star, -1.0);
  d.gamma2 = indicial_detail::branch_root(n, p, a, mu, d.gamma_star, +1.0);
  return d;
}

/// Hardy-Sobolev-Maz'ya critical exponent np/(n-(a+1-b)p).
inline double critical_exponent(int n, double p, double a, double b) {
  indicial_detail::check_np(n, p);
  require(a >= 0.0 && a < (n - p) / p, ErrorKind::Domain, "critical exponent needs 0 <= a < (n-p)/p");
  require(b >= a && b < a + 1.0, ErrorKind::Domain, "critical exponent needs a <= b < a+1");
  return n * p / (n - (a + 1.0 - b) * p);
}

}  // namespace plap
