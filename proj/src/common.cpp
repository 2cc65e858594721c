#include "gail/common.hpp"

#include <cmath>

namespace gail {

VectorXd sample_uniform_ball(const VectorXd& center, double radius, Rng& rng) {
  const Eigen::Index n = center.size();
  if (n == 0 || radius == 0.0) return center;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  VectorXd dir(n);
  for (Eigen::Index i = 0; i < n; ++i) dir[i] = normal(rng);
  const double scale =
      radius * std::pow(unif(rng), 1.0 / static_cast<double>(n));
  return center + scale * dir / dir.norm();
}

double distance(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("distance: dimension mismatch");
  }
  return (a - b).norm();
}

}  // namespace gail
