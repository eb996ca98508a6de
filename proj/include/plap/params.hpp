#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "plap/error.hpp"

namespace plap {

/// Power nonlinearity f(u) = amplitude * u^(q-1).
struct Nonlinearity {
  double q = 0.0;
  double amplitude = 0.0;
};

/// Parameters shared by every equation in the library: dimension n, exponent p,
/// weight exponent a, Hardy coefficient mu, eigenvalue coefficient lambda.
struct ProblemParams {
  int n = 3;
  double p = 2.0;
  double a = 0.0;
  double mu = 0.0;
  double lambda = 0.0;
  std::optional<Nonlinearity> nonlinearity;

  /// Sobolev exponent np/(n-p).
  double sobolev_exponent() const { return n * p / (n - p); }

  void validate() const {
    require(n >= 2, ErrorKind::Domain, "dimension n must be >= 2, got " + std::to_string(n));
    require(std::isfinite(p) && p > 1.0 && p < n, ErrorKind::Domain,
            "exponent p must satisfy 1 < p < n (p=" + std::to_string(p) + ", n=" + std::to_string(n) + ")");
    require(std::isfinite(a) && std::isfinite(mu) && std::isfinite(lambda), ErrorKind::Domain,
            "a, mu, lambda must be finite");
    if (nonlinearity) {
      const double ps = sobolev_exponent();
      require(nonlinearity->q > p && nonlinearity->q < ps, ErrorKind::Domain,
              "nonlinearity exponent must satisfy p < q < np/(n-p) (q=" + std::to_string(nonlinearity->q) + ")");
      require(std::isfinite(nonlinearity->amplitude), ErrorKind::Domain, "nonlinearity amplitude must be finite");
    }
  }
};

/// Eigen-rate (lambda/(p-1))^(1/p).
inline double eigen_rate_alpha(double lambda, double p) {
  require(p > 1.0, ErrorKind::Domain, "eigen rate needs p > 1");
  require(lambda > 0.0, ErrorKind::Domain, "eigen rate needs lambda > 0");
  return std::pow(lambda / (p - 1.0), 1.0 / p);
}

/// |t|^(e-1) t, the odd power used throughout p-Laplace terms.
inline double signed_pow(double t, double e) {
  if (t == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(t), e), t);
}

}  // namespace plap
