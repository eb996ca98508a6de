#include <gtest/gtest.h>

#include <cmath>

#include "plap/ode.hpp"
#include "plap/radial_ode.hpp"

using namespace plap;

TEST(Integrator, ExponentialToTolerance) {
  auto rhs = [](double, const ode::State<1>& y, ode::State<1>& dy) { dy[0] = y[0]; };
  ode::Integrator<1> it;
  double t = 0.0;
  ode::State<1> y{1.0};
  EXPECT_EQ(it.advance(rhs, t, y, 10.0), ode::Outcome::Reached);
  EXPECT_EQ(t, 10.0);
  EXPECT_NEAR(y[0] / std::exp(10.0), 1.0, 1e-8);
}

TEST(Integrator, BackwardAndHarmonic) {
  auto rhs = [](double, const ode::State<2>& y, ode::State<2>& dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  ode::Integrator<2> it;
  double t = 0.0;
  ode::State<2> y{0.0, 1.0};
  it.advance(rhs, t, y, -3.0);
  EXPECT_NEAR(y[0], std::sin(-3.0), 1e-9);
  EXPECT_NEAR(y[1], std::cos(-3.0), 1e-9);
}

TEST(Integrator, ObserverStops) {
  auto rhs = [](double, const ode::State<1>& y, ode::State<1>& dy) { dy[0] = y[0]; };
  ode::Integrator<1> it;
  double t = 0.0;
  ode::State<1> y{1.0};
  const auto out = it.advance(rhs, t, y, 10.0, [](double, const ode::State<1>& s) { return s[0] < 100.0; });
  EXPECT_EQ(out, ode::Outcome::Stopped);
  EXPECT_GE(y[0], 100.0);
  EXPECT_LT(t, 10.0);
}

TEST(Integrator, StepFailureOnFiniteTimeBlowUp) {
  // y' = y^2, y(0) = 1 blows up at t = 1
  auto rhs = [](double, const ode::State<1>& y, ode::State<1>& dy) { dy[0] = y[0] * y[0]; };
  ode::Integrator<1> it;
  double t = 0.0;
  ode::State<1> y{1.0};
  try {
    it.advance(rhs, t, y, 2.0);
    FAIL() << "expected StepFailure";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StepFailure);
  }
}

TEST(FixedStep, FifthOrderConvergence) {
  auto rhs = [](double, const ode::State<1>& y, ode::State<1>& dy) { dy[0] = -2.0 * y[0]; };
  double prev = 0.0;
  for (std::size_t steps : {10, 20, 40}) {
    const auto y = ode::fixed_step<1>(rhs, 0.0, ode::State<1>{1.0}, 2.0, steps);
    const double err = std::abs(y[0] - std::exp(-4.0));
    if (prev > 0.0) EXPECT_GT(prev / err, 24.0);  // 2^5 asymptotically
    prev = err;
  }
}

TEST(EigenProfile1d, ExponentialP2) {
  const auto prof = eigen_profile_1d(1.0, 2.0, 1.0, 1.0, 0.0, 10.0, 100);
  double err = 0.0;
  for (std::size_t i = 0; i < prof.size(); ++i) err = std::max(err, std::abs(prof.u(i) / std::exp(prof.r(i)) - 1.0));
  EXPECT_LE(err, 1e-8);
}

TEST(EigenProfile1d, ExponentialP3) {
  const auto prof = eigen_profile_1d(2.0, 3.0, 1.0, 1.0, 0.0, 10.0, 100);
  double err = 0.0;
  for (std::size_t i = 0; i < prof.size(); ++i) err = std::max(err, std::abs(prof.u(i) / std::exp(prof.r(i)) - 1.0));
  EXPECT_LE(err, 1e-8);
}

TEST(EigenProfile1d, CoshFromRest) {
  const auto prof = eigen_profile_1d(1.0, 2.0, 1.0, 0.0, 0.0, 5.0, 50);
  for (std::size_t i = 0; i < prof.size(); ++i) {
    EXPECT_NEAR(prof.u(i) / std::cosh(prof.r(i)), 1.0, 1e-8);
    EXPECT_NEAR(prof.du(i), std::sinh(prof.r(i)), 1e-8 * std::cosh(prof.r(i)));
  }
}

TEST(EigenProfile1d, FixedStepOrder) {
  // halving the step reduces the sup-error by at least 2^4 / 2
  auto sup_err = [](std::size_t steps) {
    Profile1dOptions o;
    o.adaptive = false;
    const auto prof = eigen_profile_1d(2.0, 3.0, 1.0, 1.0, 0.0, 4.0, steps, o);
    double e = 0.0;
    for (std::size_t i = 0; i < prof.size(); ++i) e = std::max(e, std::abs(prof.u(i) / std::exp(prof.r(i)) - 1.0));
    return e;
  };
  const double e1 = sup_err(20), e2 = sup_err(40), e3 = sup_err(80);
  EXPECT_GE(e1 / e2, 8.0);
  EXPECT_GE(e2 / e3, 8.0);
}

TEST(EigenProfile1d, Preconditions) {
  EXPECT_THROW(eigen_profile_1d(1.0, 2.0, 0.0, 1.0, 0.0, 1.0, 10), Error);
  EXPECT_THROW(eigen_profile_1d(1.0, 2.0, 1.0, -1.0, 0.0, 1.0, 10), Error);
  EXPECT_THROW(eigen_profile_1d(1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 10), Error);
}

TEST(Riccati, FixedPoint) {
  for (double p : {1.5, 2.0, 3.0}) {
    const double a = eigen_rate_alpha(1.3, p);
    const auto c = riccati_ratio_flow(1.3, p, a, 0.0, 20.0);
    for (double s : c.s) EXPECT_NEAR(s, a, 1e-12);
  }
}

TEST(Riccati, P2ClosedForms) {
  const auto up = riccati_ratio_flow(1.0, 2.0, 2.0, 0.0, 10.0, 201);
  const auto down = riccati_ratio_flow(1.0, 2.0, 0.5, 0.0, 10.0, 201);
  for (std::size_t k = 0; k < up.t.size(); ++k) {
    const double t = up.t[k];
    EXPECT_NEAR(up.s[k], 1.0 / std::tanh(t + std::atanh(0.5)), 1e-8);
    EXPECT_NEAR(down.s[k], std::tanh(t + std::atanh(0.5)), 1e-8);
    if (k > 0) {
      EXPECT_LE(up.s[k], up.s[k - 1]);
      EXPECT_GE(down.s[k], down.s[k - 1]);
    }
  }
}

TEST(Riccati, SingularRatioBackward) {
  // backwards in t the ratio below alpha runs into 0
  try {
    riccati_ratio_flow(1.0, 1.5, 0.5, 0.0, -20.0);
    FAIL() << "expected SingularRatio";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularRatio);
  }
}
