#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gail {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Single generator type used everywhere; identical seeds give identical streams.
using Rng = std::mt19937_64;

/// Invalid user configuration (bad radius, odd width under symmetric init, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Stationary distribution is not unique (or the chain does not mix).
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// KL divergence is infinite because of a support violation.
class DivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A runtime numerical check failed (non-finite iterate, broken invariant).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Draws an index from a probability vector by inverse-CDF on one uniform.
template <typename Vec>
int sample_categorical(const Vec& probs, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  const int n = static_cast<int>(probs.size());
  for (int i = 0; i < n; ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  // u landed in the rounding slack above the last partial sum
  for (int i = n - 1; i >= 0; --i) {
    if (probs[i] > 0.0) return i;
  }
  return n - 1;
}

/// Uniform draw from the Euclidean ball of the given radius around `center`.
VectorXd sample_uniform_ball(const VectorXd& center, double radius, Rng& rng);

/// ℓ2 distance between two vectors, throwing on shape mismatch.
double distance(const VectorXd& a, const VectorXd& b);

}  // namespace gail
