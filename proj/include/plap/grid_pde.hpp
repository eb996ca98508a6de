#pragma once

// Finite differences for -Δ_p v = -λ v^{p-1} on a rectangle, the linearized
// operator, and pointwise diagnostics (gradient bound, directional range,
// Bochner identity, κ bound).

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "plap/error.hpp"
#include "plap/field.hpp"
#include "plap/params.hpp"

namespace plap {

struct SolveStats {
  int newton_iters = 0;
  double final_residual = 0.0;
  int damping_events = 0;
  double epsilon = 0.0;
};

struct SolveResult {
  Field2D field;
  SolveStats stats;
};

struct SolveOptions {
  int max_iters = 50;
  double amplitude = 1.0;              // boundary data C e^{α<x,ξ>}
  std::optional<double> epsilon;       // default 1e-8 α max|boundary|
  double damping_floor = 0x1p-30;
};

namespace grid_detail {

// One face between nodes A (left/below) and B. Normal difference d = (vB-vA)/h,
// transverse difference t averaged from the two centred differences at A and B.
// Stencil order: A, B, then the four transverse nodes (A+, A-, B+, B-).
struct Face {
  std::array<std::size_t, 6> node;
};

inline Face x_face(const Grid& g, std::size_t i, std::size_t j) {  // between (i,j) and (i+1,j)
  return {{g.index(i, j), g.index(i + 1, j), g.index(i, j + 1), g.index(i, j - 1), g.index(i + 1, j + 1),
           g.index(i + 1, j - 1)}};
}
inline Face y_face(const Grid& g, std::size_t i, std::size_t j) {  // between (i,j) and (i,j+1)
  // transverse direction is -x, so a quarter turn maps x-faces onto y-faces
  return {{g.index(i, j), g.index(i, j + 1), g.index(i - 1, j), g.index(i + 1, j), g.index(i - 1, j + 1),
           g.index(i + 1, j + 1)}};
}

inline constexpr std::array<double, 6> kNormalWeights{-1.0, 1.0, 0.0, 0.0, 0.0, 0.0};
inline constexpr std::array<double, 6> kTransverseWeights{0.0, 0.0, 0.25, -0.25, 0.25, -0.25};

inline std::pair<double, double> face_gradient(const Face& f, const std::vector<double>& v, double h) {
  const double d = (v[f.node[1]] - v[f.node[0]]) / h;
  const double t = ((v[f.node[2]] - v[f.node[3]]) + (v[f.node[4]] - v[f.node[5]])) * (0.25 / h);
  return {d, t};
}

inline double conductivity(double g2, double p, double eps) {
  if (p == 2.0) return 1.0;
  return std::pow(g2 + eps * eps, 0.5 * (p - 2.0));
}

// Normal flux a(|∇v|) d.
inline double face_flux(const Face& f, const std::vector<double>& v, double h, double p, double eps) {
  const auto [d, t] = face_gradient(f, v, h);
  return conductivity(d * d + t * t, p, eps) * d;
}

// Normal component of a(|∇v|) A(∇g), A = I + (p-2) ∇v⊗∇v / (|∇v|²+ε²).
inline double linear_face_flux(const Face& f, const std::vector<double>& v, const std::vector<double>& g, double h,
                               double p, double eps) {
  const auto [d, t] = face_gradient(f, v, h);
  const auto [gd, gt] = face_gradient(f, g, h);
  const double s = d * d + t * t + eps * eps;
  const double a = conductivity(d * d + t * t, p, eps);
  const double proj = s > 0.0 ? (p - 2.0) * (d * gd + t * gt) / s : 0.0;
  return a * (gd + proj * d);
}

// d(face_flux)/d(v at stencil node k), k = 0..5.
inline std::array<double, 6> face_flux_jacobian(const Face& f, const std::vector<double>& v, double h, double p,
                                                double eps) {
  const auto [d, t] = face_gradient(f, v, h);
  const double s = d * d + t * t + eps * eps;
  const double a = conductivity(d * d + t * t, p, eps);
  const double c = s > 0.0 ? (p - 2.0) / s : 0.0;
  std::array<double, 6> out{};
  for (std::size_t k = 0; k < 6; ++k) {
    const double dd = kNormalWeights[k] / h, dt = kTransverseWeights[k] / h;
    out[k] = a * (dd + c * (d * dd + t * dt) * d);
  }
  return out;
}

inline double source(double v, double p, double lambda) {
  return p == 2.0 ? lambda * v : lambda * std::pow(v, p - 1.0);
}

inline double sup_interior(const Grid& g, const std::vector<double>& r) {
  double s = 0.0;
  for (std::size_t j = 1; j + 1 < g.ny; ++j)
    for (std::size_t i = 1; i + 1 < g.nx; ++i) {
      const double a = std::abs(r[g.index(i, j)]);
      if (!(a <= s)) s = std::isnan(a) ? std::numeric_limits<double>::infinity() : a;
    }
  return s;
}

// -div(flux) + λ v^{p-1} at interior nodes; boundary entries left at 0.
inline std::vector<double> residual(const Grid& g, const std::vector<double>& v, double p, double lambda, double eps) {
  std::vector<double> r(g.size(), 0.0);
  const double h = g.h;
  for (std::size_t j = 1; j + 1 < g.ny; ++j)
    for (std::size_t i = 1; i + 1 < g.nx; ++i) {
      const double fe = face_flux(x_face(g, i, j), v, h, p, eps);
      const double fw = face_flux(x_face(g, i - 1, j), v, h, p, eps);
      const double fn = face_flux(y_face(g, i, j), v, h, p, eps);
      const double fs = face_flux(y_face(g, i, j - 1), v, h, p, eps);
      r[g.index(i, j)] = -((fe - fw) + (fn - fs)) / h + source(v[g.index(i, j)], p, lambda);
    }
  return r;
}

inline double centered_dx(const Grid& g, const std::vector<double>& w, std::size_t i, std::size_t j) {
  return (w[g.index(i + 1, j)] - w[g.index(i - 1, j)]) / (2.0 * g.h);
}
inline double centered_dy(const Grid& g, const std::vector<double>& w, std::size_t i, std::size_t j) {
  return (w[g.index(i, j + 1)] - w[g.index(i, j - 1)]) / (2.0 * g.h);
}

inline std::vector<double> log_values(const Field2D& f) {
  f.require_positive();
  std::vector<double> w(f.values.size());
  std::transform(f.values.begin(), f.values.end(), w.begin(), [](double x) { return std::log(x); });
  return w;
}

}  // namespace grid_detail

/// Discrete -div((|∇v|²+ε²)^{(p-2)/2}∇v) + λ v^{p-1} on interior nodes.
inline MaskedField p_laplace_residual(const Field2D& field, double p, double lambda, double epsilon = 0.0) {
  field.require_positive();
  require(p > 1.0, ErrorKind::Domain, "residual needs p > 1");
  require(epsilon >= 0.0, ErrorKind::Domain, "regularization must be >= 0");
  const Grid& g = field.grid;
  const auto r = grid_detail::residual(g, field.values, p, lambda, epsilon);
  MaskedField out(g);
  for (std::size_t j = 1; j + 1 < g.ny; ++j)
    for (std::size_t i = 1; i + 1 < g.nx; ++i) out.set(i, j, r[g.index(i, j)]);
  return out;
}

/// Coons patch of boundary values: exact on the boundary, smooth inside.
inline void transfinite_fill(Field2D& f) {
  const Grid& g = f.grid;
  const std::size_t I = g.nx - 1, J = g.ny - 1;
  const double c00 = f(0, 0), c10 = f(I, 0), c01 = f(0, J), c11 = f(I, J);
  double floor = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= I; ++i) floor = std::min({floor, f(i, 0), f(i, J)});
  for (std::size_t j = 0; j <= J; ++j) floor = std::min({floor, f(0, j), f(I, j)});
  for (std::size_t j = 1; j < J; ++j)
    for (std::size_t i = 1; i < I; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(I);
      const double t = static_cast<double>(j) / static_cast<double>(J);
      const double v = (1 - s) * f(0, j) + s * f(I, j) + (1 - t) * f(i, 0) + t * f(i, J) -
                       ((1 - s) * (1 - t) * c00 + s * (1 - t) * c10 + (1 - s) * t * c01 + s * t * c11);
      f(i, j) = std::max(v, 0.5 * floor);
    }
}

/// Damped Newton for the regularized Dirichlet problem with data C e^{α<x,ξ>}.
inline SolveResult solve_dirichlet(const ProblemParams& params, std::array<double, 2> xi, const Rect& rect, double h,
                                   double tol = 1e-9, const SolveOptions& opt = {}) {
  const double p = params.p, lambda = params.lambda;
  require(std::abs(std::hypot(xi[0], xi[1]) - 1.0) <= 1e-12, ErrorKind::Domain, "xi must be a unit vector");
  require(p > 1.0 && std::isfinite(p), ErrorKind::Domain, "solve needs p > 1");
  require(lambda > 0.0, ErrorKind::Domain, "solve needs lambda > 0");
  require(tol > 0.0 && opt.max_iters >= 0 && opt.amplitude > 0.0, ErrorKind::Domain, "bad solver options");
  const Grid g = make_grid(rect, h);
  const double alpha = eigen_rate_alpha(lambda, p);

  Field2D f{g, std::vector<double>(g.size(), 0.0)};
  double vscale = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i)
      if (!g.interior(i, j)) {
        f(i, j) = opt.amplitude * std::exp(alpha * (xi[0] * g.x(i) + xi[1] * g.y(j)));
        vscale = std::max(vscale, f(i, j));
      }
  transfinite_fill(f);

  SolveStats stats;
  stats.epsilon = opt.epsilon.value_or(1e-8 * alpha * vscale);
  const double eps = stats.epsilon;

  // interior unknown numbering
  const std::size_t mx = g.nx - 2, my = g.ny - 2, m = mx * my;
  auto unknown = [&](std::size_t node) -> std::ptrdiff_t {
    const std::size_t i = node % g.nx, j = node / g.nx;
    if (!g.interior(i, j)) return -1;
    return static_cast<std::ptrdiff_t>((j - 1) * mx + (i - 1));
  };

  std::vector<double> r = grid_detail::residual(g, f.values, p, lambda, eps);
  double norm = grid_detail::sup_interior(g, r);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m * 13);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool pattern_ready = false;

  while (norm > tol) {
    if (stats.newton_iters >= opt.max_iters) break;
    ++stats.newton_iters;
    trip.clear();
    for (std::size_t j = 1; j + 1 < g.ny; ++j)
      for (std::size_t i = 1; i + 1 < g.nx; ++i) {
        const std::size_t node = g.index(i, j);
        const auto row = unknown(node);
        rhs[row] = -r[node];
        auto add_face = [&](const grid_detail::Face& face, double sign) {
          const auto jac = grid_detail::face_flux_jacobian(face, f.values, h, p, eps);
          for (std::size_t k = 0; k < 6; ++k) {
            const auto col = unknown(face.node[k]);
            if (col >= 0 && jac[k] != 0.0) trip.emplace_back(row, col, -sign * jac[k] / h);
          }
        };
        add_face(grid_detail::x_face(g, i, j), 1.0);
        add_face(grid_detail::x_face(g, i - 1, j), -1.0);
        add_face(grid_detail::y_face(g, i, j), 1.0);
        add_face(grid_detail::y_face(g, i, j - 1), -1.0);
        const double v = f.values[node];
        const double ds = p == 2.0 ? lambda : (p - 1.0) * lambda * std::pow(v, p - 2.0);
        trip.emplace_back(row, row, ds);
      }
    Eigen::SparseMatrix<double> J(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    J.setFromTriplets(trip.begin(), trip.end());
    J.makeCompressed();
    if (!pattern_ready) {
      lu.analyzePattern(J);
      pattern_ready = true;
    }
    lu.factorize(J);
    require(lu.info() == Eigen::Success, ErrorKind::NoConvergence, "Newton matrix factorization failed");
    const Eigen::VectorXd delta = lu.solve(rhs);

    double theta = 1.0;
    std::vector<double> trial = f.values;
    for (;;) {
      for (std::size_t j = 1; j + 1 < g.ny; ++j)
        for (std::size_t i = 1; i + 1 < g.nx; ++i) {
          const std::size_t node = g.index(i, j);
          trial[node] = f.values[node] + theta * delta[unknown(node)];
        }
      bool positive = true;
      for (double x : trial) positive = positive && x > 0.0;
      if (positive) {
        auto rt = grid_detail::residual(g, trial, p, lambda, eps);
        const double nt = grid_detail::sup_interior(g, rt);
        if (nt < norm) {
          f.values.swap(trial);
          r.swap(rt);
          norm = nt;
          break;
        }
      }
      theta *= 0.5;
      ++stats.damping_events;
      if (theta < opt.damping_floor) {
        stats.final_residual = norm;
        throw Error(ErrorKind::NoConvergence,
                    "damping floor reached at residual " + csv::number(norm) + " (h may be too coarse)");
      }
    }
  }
  stats.final_residual = norm;
  require(norm <= tol, ErrorKind::NoConvergence,
          "no convergence after " + std::to_string(stats.newton_iters) + " Newton iterations (residual " +
              csv::number(norm) + ")");
  return {std::move(f), stats};
}

/// Discrete L_v(g) = div(a(|∇v|) A(∇g)) on interior nodes, masked where |∇v| is
/// below `threshold` (default 1e-3 of its interior maximum).
inline MaskedField linearized_apply(const Field2D& v, const Field2D& g, double p, double epsilon = 0.0,
                                    std::optional<double> threshold = std::nullopt) {
  require(v.grid == g.grid && g.values.size() == v.values.size(), ErrorKind::Domain,
          "fields must share a grid");
  require(p > 1.0 && epsilon >= 0.0, ErrorKind::Domain, "linearized operator needs p > 1, eps >= 0");
  const Grid& G = v.grid;
  const double h = G.h;
  std::vector<double> grad(G.size(), 0.0);
  double gmax = 0.0;
  for (std::size_t j = 1; j + 1 < G.ny; ++j)
    for (std::size_t i = 1; i + 1 < G.nx; ++i) {
      const double gx = grid_detail::centered_dx(G, v.values, i, j), gy = grid_detail::centered_dy(G, v.values, i, j);
      grad[G.index(i, j)] = std::hypot(gx, gy);
      gmax = std::max(gmax, grad[G.index(i, j)]);
    }
  const double thr = threshold.value_or(1e-3 * gmax);
  MaskedField out(G);
  for (std::size_t j = 1; j + 1 < G.ny; ++j)
    for (std::size_t i = 1; i + 1 < G.nx; ++i) {
      if (!(grad[G.index(i, j)] > thr)) continue;
      using namespace grid_detail;
      const double fe = linear_face_flux(x_face(G, i, j), v.values, g.values, h, p, epsilon);
      const double fw = linear_face_flux(x_face(G, i - 1, j), v.values, g.values, h, p, epsilon);
      const double fn = linear_face_flux(y_face(G, i, j), v.values, g.values, h, p, epsilon);
      const double fs = linear_face_flux(y_face(G, i, j - 1), v.values, g.values, h, p, epsilon);
      out.set(i, j, ((fe - fw) + (fn - fs)) / h);
    }
  return out;
}

/// <A(∇g), ∇g> / |∇g|², A = I + (p-2) ∇v⊗∇v/|∇v|².
inline double ellipticity_check(std::span<const double> grad_v, std::span<const double> grad_g, double p) {
  require(grad_v.size() == grad_g.size() && !grad_v.empty(), ErrorKind::Domain, "gradient dimensions differ");
  double vv = 0.0, gg = 0.0, vg = 0.0;
  for (std::size_t k = 0; k < grad_v.size(); ++k) {
    vv += grad_v[k] * grad_v[k];
    gg += grad_g[k] * grad_g[k];
    vg += grad_v[k] * grad_g[k];
  }
  require(vv > 0.0 && gg > 0.0, ErrorKind::Domain, "ellipticity ratio needs nonzero gradients");
  // 1 + (p-2) cos²θ, with cos² clamped against rounding
  const double c2 = std::clamp(vg * vg / (vv * gg), 0.0, 1.0);
  return 1.0 + (p - 2.0) * c2;
}

/// max over interior nodes of |∇ log v| (centred differences).
inline double gradient_log_sup(const Field2D& field) {
  const auto w = grid_detail::log_values(field);
  const Grid& g = field.grid;
  double s = 0.0;
  for (std::size_t j = 1; j + 1 < g.ny; ++j)
    for (std::size_t i = 1; i + 1 < g.nx; ++i)
      s = std::max(s, std::hypot(grid_detail::centered_dx(g, w, i, j), grid_detail::centered_dy(g, w, i, j)));
  return s;
}

/// Same, with ∇ log v supplied in closed form and evaluated on interior nodes.
inline double gradient_log_sup(const Grid& g, const std::function<std::array<double, 2>(double, double)>& grad_log) {
  double s = 0.0;
  for (std::size_t j = 1; j + 1 < g.ny; ++j)
    for (std::size_t i = 1; i + 1 < g.nx; ++i) {
      const auto d = grad_log(g.x(i), g.y(j));
      s = std::max(s, std::hypot(d[0], d[1]));
    }
  return s;
}

struct Range {
  double inf = 0.0;
  double sup = 0.0;
};

/// Extrema of <∇ log v, ν> over interior nodes.
inline Range directional_range(const Field2D& field, std::array<double, 2> nu) {
  require(std::abs(std::hypot(nu[0], nu[1]) - 1.0) <= 1e-12, ErrorKind::Domain, "nu must be a unit vector");
  const auto w = grid_detail::log_values(field);
  const Grid& g = field.grid;
  Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t j = 1; j + 1 < g.ny; ++j)
    for (std::size_t i = 1; i + 1 < g.nx; ++i) {
      const double d = nu[0] * grid_detail::centered_dx(g, w, i, j) + nu[1] * grid_detail::centered_dy(g, w, i, j);
      r.inf = std::min(r.inf, d);
      r.sup = std::max(r.sup, d);
    }
  return r;
}

/// ((p-1)^{p-1} λ)^{2/p}.
inline double kappa(double p, double lambda) {
  require(p > 1.0 && lambda > 0.0, ErrorKind::Domain, "kappa needs p > 1, lambda > 0");
  return std::pow(std::pow(p - 1.0, p - 1.0) * lambda, 2.0 / p);
}

struct KappaCheck {
  double max_f = 0.0;
  double kappa = 0.0;
};

/// max of f = |∇w|², w = -(p-1) log v, against κ.
inline KappaCheck kappa_bound_check(const Field2D& field, double p, double lambda) {
  const double s = gradient_log_sup(field);
  return {(p - 1.0) * (p - 1.0) * s * s, kappa(p, lambda)};
}

struct BochnerResult {
  double max_residual = 0.0;
  std::size_t evaluated = 0;
};

/// max |L_w(f) - [2 f^{p/2-1} Σ w_ij² + (p/2-1)|∇f|² f^{p/2-2} + p f^{p/2-1}<∇w,∇f>]|
/// over nodes with f > threshold (default 1e-6 κ). All derivatives by nested
/// centred differences, so four rings of boundary nodes are not evaluated.
inline BochnerResult bochner_residual(const Field2D& field, double p, double lambda,
                                      std::optional<double> threshold = std::nullopt) {
  const Grid& g = field.grid;
  require(g.nx >= 9 && g.ny >= 9, ErrorKind::Domain, "bochner residual needs at least 9x9 nodes");
  auto w = grid_detail::log_values(field);
  for (double& x : w) x *= -(p - 1.0);
  const double thr = threshold.value_or(1e-6 * kappa(p, lambda));
  const std::size_t N = g.size();
  const double h = g.h;
  using grid_detail::centered_dx;
  using grid_detail::centered_dy;

  // ring 1: ∇w, f, w_ij
  std::vector<double> wx(N), wy(N), f(N), wxx(N), wyy(N), wxy(N);
  for (std::size_t j = 1; j + 1 < g.ny; ++j)
    for (std::size_t i = 1; i + 1 < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      wx[k] = centered_dx(g, w, i, j);
      wy[k] = centered_dy(g, w, i, j);
      f[k] = wx[k] * wx[k] + wy[k] * wy[k];
      wxx[k] = (w[g.index(i + 1, j)] - 2.0 * w[k] + w[g.index(i - 1, j)]) / (h * h);
      wyy[k] = (w[g.index(i, j + 1)] - 2.0 * w[k] + w[g.index(i, j - 1)]) / (h * h);
      wxy[k] = (w[g.index(i + 1, j + 1)] - w[g.index(i - 1, j + 1)] - w[g.index(i + 1, j - 1)] +
                w[g.index(i - 1, j - 1)]) /
               (4.0 * h * h);
    }
  // ring 2: ∇f and the flux |∇w|^{p-2} A_w(∇f)
  std::vector<double> fx(N), fy(N), qx(N), qy(N);
  for (std::size_t j = 2; j + 2 < g.ny; ++j)
    for (std::size_t i = 2; i + 2 < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      fx[k] = centered_dx(g, f, i, j);
      fy[k] = centered_dy(g, f, i, j);
      const double a = f[k] > 0.0 ? std::pow(f[k], 0.5 * p - 1.0) : 0.0;
      const double proj = f[k] > 0.0 ? (p - 2.0) * (wx[k] * fx[k] + wy[k] * fy[k]) / f[k] : 0.0;
      qx[k] = a * (fx[k] + proj * wx[k]);
      qy[k] = a * (fy[k] + proj * wy[k]);
    }
  BochnerResult res;
  for (std::size_t j = 3; j + 3 < g.ny; ++j)
    for (std::size_t i = 3; i + 3 < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (!(f[k] > thr)) continue;
      // the divergence stencil reaches ring-2 neighbours; skip if any is critical
      bool ok = true;
      for (std::size_t nb : {g.index(i + 1, j), g.index(i - 1, j), g.index(i, j + 1), g.index(i, j - 1)})
        ok = ok && f[nb] > thr;
      if (!ok) continue;
      const double lhs = centered_dx(g, qx, i, j) + centered_dy(g, qy, i, j);
      const double hess2 = wxx[k] * wxx[k] + wyy[k] * wyy[k] + 2.0 * wxy[k] * wxy[k];
      const double gf2 = fx[k] * fx[k] + fy[k] * fy[k];
      const double rhs = 2.0 * std::pow(f[k], 0.5 * p - 1.0) * hess2 +
                         (0.5 * p - 1.0) * gf2 * std::pow(f[k], 0.5 * p - 2.0) +
                         p * std::pow(f[k], 0.5 * p - 1.0) * (wx[k] * fx[k] + wy[k] * fy[k]);
      res.max_residual = std::max(res.max_residual, std::abs(lhs - rhs));
      ++res.evaluated;
    }
  return res;
}

struct Atom {
  std::vector<double> xi;
  double mass = 0.0;
};

struct Quadrature {
  double value = 0.0;
  bool positive = false;
};

/// Σ μ_i e^{α<x,ξ_i>}, the p = 2 representation by a discrete measure.
inline Quadrature representation_quadrature(const std::vector<Atom>& atoms, double lambda, std::span<const double> x,
                                            double p = 2.0) {
  require(p == 2.0, ErrorKind::Domain, "representation formula is only available for p = 2");
  const double alpha = eigen_rate_alpha(lambda, 2.0);
  Quadrature q;
  for (const auto& at : atoms) {
    require(at.mass > 0.0, ErrorKind::Domain, "atom masses must be positive");
    require(at.xi.size() == x.size(), ErrorKind::Domain, "atom direction has the wrong dimension");
    double n2 = 0.0, dot = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      n2 += at.xi[k] * at.xi[k];
      dot += at.xi[k] * x[k];
    }
    require(std::abs(std::sqrt(n2) - 1.0) <= 1e-12, ErrorKind::Domain, "atom directions must be unit vectors");
    q.value += at.mass * std::exp(alpha * dot);
  }
  q.positive = q.value > 0.0;
  return q;
}

}  // namespace plap
