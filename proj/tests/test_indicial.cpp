#include <gtest/gtest.h>

#include <cmath>

#include "plap/indicial.hpp"

using namespace plap;

namespace {

ProblemParams P(int n, double p, double a, double mu) {
  ProblemParams q;
  q.n = n;
  q.p = p;
  q.a = a;
  q.mu = mu;
  return q;
}

void expect_kind(ErrorKind kind, const std::function<void()>& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(HardyConstant, Examples) {
  EXPECT_DOUBLE_EQ(hardy_best_constant(3, 2.0, 0.0), 0.25);
  EXPECT_EQ(hardy_best_constant(4, 2.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(hardy_best_constant(5, 2.0, -1.0), 6.25);
}

TEST(HardyConstant, DomainErrors) {
  expect_kind(ErrorKind::Domain, [] { hardy_best_constant(3, 3.0, 0.0); });
  expect_kind(ErrorKind::Domain, [] { hardy_best_constant(3, 1.0, 0.0); });
  expect_kind(ErrorKind::Domain, [] { hardy_best_constant(1, 1.5, 0.0); });
}

TEST(EigenRate, Examples) {
  EXPECT_DOUBLE_EQ(eigen_rate_alpha(1.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(eigen_rate_alpha(2.0, 3.0), 1.0);
  EXPECT_NEAR(eigen_rate_alpha(1.0, 1.5), std::pow(2.0, 2.0 / 3.0), 1e-15);
  EXPECT_NEAR(eigen_rate_alpha(1.0, 1.5), 1.5874, 1e-4);
  expect_kind(ErrorKind::Domain, [] { eigen_rate_alpha(0.0, 2.0); });
  expect_kind(ErrorKind::Domain, [] { eigen_rate_alpha(-1.0, 2.0); });
}

TEST(AuxiliaryF, Examples) {
  EXPECT_DOUBLE_EQ(auxiliary_f(1.0, 4, 2.0, 0.0), 1.0);
  for (double p : {1.2, 1.5, 2.0, 2.5})
    for (int n : {3, 4, 7}) EXPECT_EQ(auxiliary_f(0.0, n, p, 0.3), 0.0);
  EXPECT_EQ(auxiliary_f(3.0, 5, 2.0, 0.0), 0.0);
}

TEST(AuxiliaryF, MaximumAtGammaStar) {
  const int n = 5;
  const double p = 1.7, a = 0.2;
  const double gs = (n - (a + 1) * p) / p;
  EXPECT_NEAR(auxiliary_f(gs, n, p, a), hardy_best_constant(n, p, a), 1e-13);
  EXPECT_NEAR(auxiliary_f_derivative(gs, n, p, a), 0.0, 1e-13);
}

TEST(IndicialRoots, FactorisedMuZero) {
  const auto d = indicial_roots(P(4, 2.0, 0.0, 0.0));
  EXPECT_NEAR(d.gamma1, 0.0, 1e-15);
  EXPECT_NEAR(d.gamma2, 2.0, 1e-14);
  EXPECT_FALSE(d.double_root);
  EXPECT_EQ(d.placement, Placement::SubcriticalNonnegativeMu);
  EXPECT_TRUE(placement_satisfied(d));
}

TEST(IndicialRoots, DoubleRoot) {
  const auto d = indicial_roots(P(3, 2.0, 0.0, 0.25));
  EXPECT_TRUE(d.double_root);
  EXPECT_DOUBLE_EQ(d.gamma1, 0.5);
  EXPECT_DOUBLE_EQ(d.gamma2, 0.5);
  EXPECT_DOUBLE_EQ(d.gamma_star, 0.5);
}

TEST(IndicialRoots, QuadraticOracle) {
  // gamma (2 - gamma) = 0.75
  const auto d = indicial_roots(P(4, 2.0, 0.0, 0.75));
  EXPECT_NEAR(d.gamma1, 0.5, 1e-14);
  EXPECT_NEAR(d.gamma2, 1.5, 1e-14);
}

TEST(IndicialRoots, NoRealRootAboveHardyConstant) {
  expect_kind(ErrorKind::NoRealRoot, [] { indicial_roots(P(3, 2.0, 0.0, 1.0)); });
  // critical weight: mu_bar = 0, positive mu has no root
  expect_kind(ErrorKind::NoRealRoot, [] { indicial_roots(P(4, 2.0, 1.0, 0.1)); });
}

TEST(IndicialRoots, CriticalWeightNegativeMu) {
  const auto d = indicial_roots(P(4, 2.0, 1.0, -1.0));
  EXPECT_EQ(d.placement, Placement::CriticalWeight);
  EXPECT_LE(d.gamma1, 0.0);
  EXPECT_GE(d.gamma2, 0.0);
  EXPECT_NEAR(d.gamma1, -1.0, 1e-14);  // -gamma^2 = -1
  EXPECT_NEAR(d.gamma2, 1.0, 1e-14);
}

TEST(IndicialRoots, AllPlacementCases) {
  struct Case {
    ProblemParams params;
    Placement expected;
  };
  const Case cases[] = {
      {P(5, 2.0, 0.0, 1.0), Placement::SubcriticalNonnegativeMu},
      {P(5, 2.0, 0.0, -2.0), Placement::SubcriticalNegativeMu},
      {P(4, 2.0, 1.0, -0.5), Placement::CriticalWeight},
      {P(3, 2.0, 1.0, 0.1), Placement::SupercriticalNonnegativeMu},
      {P(3, 2.0, 1.0, -3.0), Placement::SupercriticalNegativeMu},
      {P(6, 1.4, 0.5, 0.3), Placement::SubcriticalNonnegativeMu},
      {P(6, 3.5, 1.5, -0.7), Placement::SupercriticalNegativeMu},
  };
  for (const auto& c : cases) {
    const auto d = indicial_roots(c.params);
    EXPECT_EQ(d.placement, c.expected);
    EXPECT_TRUE(placement_satisfied(d)) << to_string(d.placement);
    EXPECT_LE(d.gamma1, d.gamma_star);
    EXPECT_LE(d.gamma_star, d.gamma2);
    const double tol = 1e-12 * std::max(1.0, std::abs(c.params.mu));
    EXPECT_NEAR(auxiliary_f(d.gamma1, c.params.n, c.params.p, c.params.a), c.params.mu, tol);
    EXPECT_NEAR(auxiliary_f(d.gamma2, c.params.n, c.params.p, c.params.a), c.params.mu, tol);
  }
}

TEST(IndicialRoots, SmallPNearZeroRoot) {
  // steep |gamma|^{p-2} near 0 for p < 2
  const auto q = P(3, 1.05, 0.0, 1e-6);
  const auto d = indicial_roots(q);
  EXPECT_NEAR(auxiliary_f(d.gamma1, 3, 1.05, 0.0), 1e-6, 1e-12);
  EXPECT_GT(d.gamma1, 0.0);
}

TEST(CriticalExponent, Examples) {
  EXPECT_DOUBLE_EQ(critical_exponent(3, 2.0, 0.0, 0.0), 6.0);
  EXPECT_DOUBLE_EQ(critical_exponent(4, 2.0, 0.0, 0.5), 8.0 / 3.0);
  EXPECT_NEAR(critical_exponent(5, 2.0, 0.5, 0.5), 10.0 / 3.0, 1e-15);
  expect_kind(ErrorKind::Domain, [] { critical_exponent(3, 2.0, 0.0, 1.0); });
  expect_kind(ErrorKind::Domain, [] { critical_exponent(3, 2.0, 0.6, 0.7); });
  expect_kind(ErrorKind::Domain, [] { critical_exponent(3, 2.0, -0.1, 0.0); });
}

TEST(ProblemParams, Validation) {
  auto q = P(3, 5.0, 0.0, 0.0);
  expect_kind(ErrorKind::Domain, [&] { q.validate(); });
  q = P(3, 2.0, 0.0, 0.0);
  q.nonlinearity = Nonlinearity{7.0, 1.0};  // above p* = 6
  expect_kind(ErrorKind::Domain, [&] { q.validate(); });
  q.nonlinearity = Nonlinearity{3.0, 1.0};
  EXPECT_NO_THROW(q.validate());
}
