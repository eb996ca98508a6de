#include <gtest/gtest.h>

#include <Eigen/Sparse>

#include <cmath>
#include <filesystem>
#include <random>

#include "plap/grid_pde.hpp"

using namespace plap;

namespace {

ProblemParams P(double p, double lambda) {
  ProblemParams q;
  q.n = 2;
  q.p = p;
  q.lambda = lambda;
  return q;
}

double sup_diff(const Field2D& a, const std::function<double(double, double)>& fn) {
  double e = 0.0;
  for (std::size_t j = 0; j < a.grid.ny; ++j)
    for (std::size_t i = 0; i < a.grid.nx; ++i) e = std::max(e, std::abs(a(i, j) - fn(a.grid.x(i), a.grid.y(j))));
  return e;
}

// independent 5-point solve of -Δv + λ v = 0 with Dirichlet data g
Field2D five_point_reference(const Grid& g, double lambda, const std::function<double(double, double)>& data) {
  const std::size_t nx = g.nx - 2, ny = g.ny - 2;
  auto id = [&](std::size_t i, std::size_t j) { return static_cast<int>((j - 1) * nx + (i - 1)); };
  std::vector<Eigen::Triplet<double>> T;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nx * ny));
  const double h2 = g.h * g.h;
  for (std::size_t j = 1; j + 1 < g.ny; ++j)
    for (std::size_t i = 1; i + 1 < g.nx; ++i) {
      const int r = id(i, j);
      T.emplace_back(r, r, 4.0 / h2 + lambda);
      const std::pair<std::size_t, std::size_t> nb[] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
      for (auto [a, c] : nb) {
        if (g.interior(a, c)) T.emplace_back(r, id(a, c), -1.0 / h2);
        else b[r] += data(g.x(a), g.y(c)) / h2;
      }
    }
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(nx * ny), static_cast<Eigen::Index>(nx * ny));
  A.setFromTriplets(T.begin(), T.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  const Eigen::VectorXd x = lu.solve(b);
  Field2D f = Field2D::sample(g, data);
  for (std::size_t j = 1; j + 1 < g.ny; ++j)
    for (std::size_t i = 1; i + 1 < g.nx; ++i) f(i, j) = x[id(i, j)];
  return f;
}

}  // namespace

TEST(Residual, Examples) {
  const Grid g = make_grid(Rect{}, 1.0 / 16);
  // constant field, p=2, lambda=0: zero
  EXPECT_EQ(p_laplace_residual(Field2D::sample(g, [](double, double) { return 3.0; }), 2.0, 0.0).sup_norm(), 0.0);
  // exponential in x: discrete error O(h^2)
  const auto ex = Field2D::sample(g, [](double x, double) { return std::exp(x); });
  const double r16 = p_laplace_residual(ex, 2.0, 1.0).sup_norm();
  const auto ex32 = Field2D::sample(make_grid(Rect{}, 1.0 / 32), [](double x, double) { return std::exp(x); });
  const double r32 = p_laplace_residual(ex32, 2.0, 1.0).sup_norm();
  EXPECT_LE(r16, 1e-2);
  EXPECT_NEAR(r16 / r32, 4.0, 0.2);
  // linear field, p=3, lambda=0: zero up to rounding
  const auto lin = Field2D::sample(g, [](double x, double y) { return 1.0 + x + 2.0 * y; });
  EXPECT_LE(p_laplace_residual(lin, 3.0, 0.0).sup_norm(), 1e-10);
  EXPECT_EQ(p_laplace_residual(lin, 3.0, 0.0).count(), (g.nx - 2) * (g.ny - 2));
}

TEST(Residual, RejectsNonPositive) {
  const Grid g = make_grid(Rect{}, 0.25);
  auto f = Field2D::sample(g, [](double, double) { return 1.0; });
  f(2, 2) = 0.0;
  try {
    p_laplace_residual(f, 2.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPositive);
  }
}

TEST(Solve, LinearCaseMatchesIndependentSolve) {
  const double h = 1.0 / 32;
  const auto res = solve_dirichlet(P(2.0, 1.0), {1.0, 0.0}, Rect{}, h, 1e-11);
  const auto ref = five_point_reference(res.field.grid, 1.0, [](double x, double) { return std::exp(x); });
  // the face stencil with p = 2 collapses to the 5-point Laplacian
  EXPECT_LE(sup_diff(res.field, [&](double x, double y) {
              const std::size_t i = static_cast<std::size_t>(std::lround(x / h));
              const std::size_t j = static_cast<std::size_t>(std::lround(y / h));
              return ref(i, j);
            }),
            1e-9);
  EXPECT_LE(res.stats.newton_iters, 3);
  EXPECT_LE(sup_diff(res.field, [](double x, double) { return std::exp(x); }), 1e-5);
}

TEST(Solve, SecondOrderConvergenceP3) {
  const double alpha = eigen_rate_alpha(2.0, 3.0);
  auto exact = [&](double x, double y) { return std::exp(alpha * (0.6 * x + 0.8 * y)); };
  std::vector<double> err;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const auto res = solve_dirichlet(P(3.0, 2.0), {0.6, 0.8}, Rect{}, h);
    EXPECT_LE(res.stats.final_residual, 1e-9);
    res.field.require_positive();
    err.push_back(sup_diff(res.field, exact));
  }
  EXPECT_GE(std::log2(err[0] / err[1]), 1.8);
  EXPECT_GE(std::log2(err[1] / err[2]), 1.8);
}

TEST(Solve, NoConvergence) {
  SolveOptions o;
  o.max_iters = 1;
  try {
    solve_dirichlet(P(3.0, 2.0), {0.6, 0.8}, Rect{}, 1.0 / 16, 1e-12, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
  }
}

TEST(Solve, Preconditions) {
  EXPECT_THROW(solve_dirichlet(P(3.0, 2.0), {1.0, 1.0}, Rect{}, 1.0 / 16), Error);
  EXPECT_THROW(solve_dirichlet(P(3.0, 0.0), {1.0, 0.0}, Rect{}, 1.0 / 16), Error);
  EXPECT_THROW(solve_dirichlet(P(3.0, 2.0), {1.0, 0.0}, Rect{}, 0.3), Error);
}

TEST(Solve, ScalingCovariance) {
  // amplitude C: solution scales by C (the equation is (p-1)-homogeneous)
  SolveOptions o;
  o.amplitude = 5.0;
  const auto a = solve_dirichlet(P(2.5, 1.0), {0.6, 0.8}, Rect{}, 1.0 / 16, 1e-11);
  const auto b = solve_dirichlet(P(2.5, 1.0), {0.6, 0.8}, Rect{}, 1.0 / 16, 1e-11, o);
  for (std::size_t k = 0; k < a.field.values.size(); ++k)
    EXPECT_NEAR(b.field.values[k] / a.field.values[k], 5.0, 1e-8);
}

TEST(Solve, RotationCovariance) {
  const double h = 1.0 / 16;
  const Rect sq{-0.5, -0.5, 0.5, 0.5};
  const auto a = solve_dirichlet(P(3.0, 2.0), {1.0, 0.0}, sq, h, 1e-11);
  const auto b = solve_dirichlet(P(3.0, 2.0), {0.0, 1.0}, sq, h, 1e-11);
  const std::size_t N = a.field.grid.nx;
  // rotating by 90 degrees maps e1 data to e2 data: (x, y) -> (-y, x)
  double diff = 0.0;
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t i = 0; i < N; ++i) diff = std::max(diff, std::abs(a.field(i, j) - b.field(N - 1 - j, i)));
  EXPECT_LE(diff, 1e-9);
}

TEST(Linearized, Identities) {
  const Grid g = make_grid(Rect{}, 1.0 / 16);
  const auto v = Field2D::sample(g, [](double x, double y) { return 1.0 + 0.3 * x + 0.4 * y; });
  const auto c = Field2D::sample(g, [](double, double) { return 2.0; });
  // constants are annihilated
  EXPECT_LE(linearized_apply(v, c, 3.0).sup_norm(), 1e-12);
  // p = 2: plain Laplacian; of a linear function it vanishes
  EXPECT_LE(linearized_apply(v, v, 2.0).sup_norm(), 1e-10);
  // L_v(v) = (p-1) Δ_p v for a linear v: zero as well
  EXPECT_LE(linearized_apply(v, v, 3.5).sup_norm(), 1e-10);
  // quadratic g with p = 2: Δ(x² + y²) = 4
  const auto q = Field2D::sample(g, [](double x, double y) { return x * x + y * y; });
  const auto Lq = linearized_apply(v, q, 2.0);
  for (std::size_t k = 0; k < Lq.values.size(); ++k)
    if (Lq.mask[k]) EXPECT_NEAR(Lq.values[k], 4.0, 1e-9);
}

TEST(Linearized, MasksCriticalSet) {
  const Grid g = make_grid(Rect{-0.5, -0.5, 0.5, 0.5}, 1.0 / 16);
  const auto v = Field2D::sample(g, [](double x, double y) { return 1.0 + x * x + y * y; });
  const auto L = linearized_apply(v, v, 3.0);
  EXPECT_FALSE(L.defined(8, 8));
  EXPECT_TRUE(L.defined(4, 4));
  const auto L0 = linearized_apply(v, v, 3.0, 0.0, -1.0);
  EXPECT_TRUE(L0.defined(8, 8));
}

TEST(Ellipticity, BoundsAndExtremes) {
  const std::array<double, 2> e1{1.0, 0.0}, e2{0.0, 1.0};
  EXPECT_DOUBLE_EQ(ellipticity_check(e1, e1, 3.0), 2.0);
  EXPECT_DOUBLE_EQ(ellipticity_check(e1, e2, 3.0), 1.0);
  EXPECT_DOUBLE_EQ(ellipticity_check(e1, e1, 1.5), 0.5);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N;
  for (int k = 0; k < 10000; ++k) {
    const std::array<double, 3> a{N(rng), N(rng), N(rng)}, b{N(rng), N(rng), N(rng)};
    const double r = ellipticity_check(a, b, 1.5);
    EXPECT_GE(r, 0.5 - 1e-15);
    EXPECT_LE(r, 1.0 + 1e-15);
  }
  EXPECT_THROW(ellipticity_check(std::array<double, 2>{0.0, 0.0}, e1, 2.0), Error);
}

TEST(GradientBounds, ExponentialFields) {
  const Grid g = make_grid(Rect{}, 1.0 / 32);
  const double alpha = eigen_rate_alpha(2.0, 3.0);
  const auto v = Field2D::sample(g, [&](double x, double y) { return std::exp(alpha * (0.6 * x + 0.8 * y)); });
  EXPECT_NEAR(gradient_log_sup(v), alpha, 1e-12);
  EXPECT_NEAR(gradient_log_sup(g, [&](double, double) { return std::array<double, 2>{0.6 * alpha, 0.8 * alpha}; }), alpha,
              1e-15);
  const auto r = directional_range(v, {0.6, 0.8});
  EXPECT_NEAR(r.inf, alpha, 1e-12);
  EXPECT_NEAR(r.sup, alpha, 1e-12);
  const auto k = kappa_bound_check(v, 3.0, 2.0);
  EXPECT_NEAR(k.max_f / k.kappa, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(kappa(2.0, 1.0), 1.0);
  EXPECT_NEAR(kappa(3.0, 2.0), 4.0, 1e-14);
}

TEST(GradientBounds, CoshSumStaysBelowRate) {
  const Grid g = make_grid(Rect{-1, -1, 1, 1}, 1.0 / 16);
  const auto v = Field2D::sample(g, [](double x, double y) { return std::exp(x) + std::exp(-x) + std::exp(y); });
  EXPECT_LT(gradient_log_sup(v), 1.0);
  const auto r = directional_range(v, {1.0, 0.0});
  EXPECT_GT(r.inf, -1.0);
  EXPECT_LT(r.sup, 1.0);
}

TEST(Bochner, ExactExponentialAndConvergence) {
  const Grid g = make_grid(Rect{-1, -1, 1, 1}, 0.25);
  const double alpha = eigen_rate_alpha(2.0, 3.0);
  const auto v = Field2D::sample(g, [&](double x, double y) { return std::exp(alpha * (0.6 * x + 0.8 * y)); });
  const auto res = bochner_residual(v, 3.0, 2.0);
  EXPECT_GT(res.evaluated, 0u);
  EXPECT_LE(res.max_residual, 1e-12);
  std::vector<double> e;
  for (double h : {1.0 / 16, 1.0 / 32}) {
    const auto w = Field2D::sample(make_grid(Rect{}, h), [](double x, double y) { return std::exp(x) + std::exp(y); });
    e.push_back(bochner_residual(w, 2.0, 1.0).max_residual);
  }
  EXPECT_GE(e[0] / e[1], 3.0);
  EXPECT_THROW(bochner_residual(Field2D::sample(make_grid(Rect{}, 0.25), [](double, double) { return 1.0; }), 2.0, 1.0),
               Error);
}

TEST(Quadrature, Examples) {
  const std::vector<double> x{0.7, 0.0};
  const std::vector<Atom> atoms{{{1.0, 0.0}, 1.0}, {{-1.0, 0.0}, 1.0}};
  const auto q = representation_quadrature(atoms, 1.0, x);
  EXPECT_NEAR(q.value, 2.0 * std::cosh(0.7), 1e-15);
  EXPECT_TRUE(q.positive);
  const auto empty = representation_quadrature({}, 1.0, x);
  EXPECT_EQ(empty.value, 0.0);
  EXPECT_FALSE(empty.positive);
  EXPECT_THROW(representation_quadrature(atoms, 1.0, x, 3.0), Error);
  EXPECT_THROW(representation_quadrature({{{1.0, 1.0}, 1.0}}, 1.0, x), Error);
}

TEST(FieldIo, BinaryRoundTripAndCsv) {
  const Grid g = make_grid(Rect{-0.5, 0.0, 0.5, 2.0}, 0.25);
  const auto f = Field2D::sample(g, [](double x, double y) { return std::exp(x) + y * y + 0.1; });
  const auto dir = std::filesystem::temp_directory_path();
  const auto bin = (dir / "plap_field.plf2").string();
  f.write_binary(bin);
  EXPECT_EQ(std::filesystem::file_size(bin), 4u + 8u + 24u + 8u * g.size());
  const auto back = Field2D::read_binary(bin);
  EXPECT_EQ(back.grid, g);
  EXPECT_EQ(back.values, f.values);
  std::filesystem::resize_file(bin, 40);
  EXPECT_THROW(Field2D::read_binary(bin), Error);
  std::filesystem::remove(bin);
  EXPECT_THROW(make_grid(Rect{}, 0.3), Error);
  EXPECT_THROW(make_grid(Rect{}, 0.75), Error);
}
