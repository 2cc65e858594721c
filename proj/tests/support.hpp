// Shared fixtures and independent oracles for the test binaries.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "gail/environments.hpp"
#include "gail/gail.hpp"
#include "gail/tabular.hpp"

namespace testing_support {

using gail::FiniteEmbeddedMDP;
using gail::MatrixXd;
using gail::Rng;
using gail::TabularPolicy;
using gail::VectorXd;

inline FiniteEmbeddedMDP random_mdp(int n_states, int n_actions, int dim,
                                    double gamma, std::uint64_t seed) {
  gail::GeneratorParams p;
  p.n_states = n_states;
  p.n_actions = n_actions;
  p.dim = dim;
  p.gamma = gamma;
  p.seed = seed;
  return gail::generate_mdp(p);
}

inline TabularPolicy random_policy(int n_states, int n_actions, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  MatrixXd p(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) p(s, a) = expo(rng);
    p.row(s) /= p.row(s).sum();
  }
  return TabularPolicy(p);
}

inline MatrixXd random_table(int rows, int cols, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd t(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) t(i, j) = u(rng);
  }
  return t;
}

/// Total variation between two distributions of equal shape.
inline double tv(const MatrixXd& p, const MatrixXd& q) {
  return 0.5 * (p - q).cwiseAbs().sum();
}

/// Empirical (s, a) histogram normalized to a distribution.
template <typename Draw>
MatrixXd histogram(int n_states, int n_actions, int n, Draw draw) {
  MatrixXd h = MatrixXd::Zero(n_states, n_actions);
  for (int i = 0; i < n; ++i) {
    const gail::StateAction sa = draw();
    h(sa.state, sa.action) += 1.0;
  }
  return h / static_cast<double>(n);
}

/// Q by iterating the Bellman operator from zero; an oracle that shares
/// nothing with the dense solve.
inline MatrixXd q_by_iteration(const FiniteEmbeddedMDP& mdp,
                               const TabularPolicy& pi, const MatrixXd& r,
                               int sweeps) {
  MatrixXd q = MatrixXd::Zero(mdp.n_states(), mdp.n_actions());
  for (int it = 0; it < sweeps; ++it) {
    VectorXd v(mdp.n_states());
    for (int s = 0; s < mdp.n_states(); ++s) v[s] = pi.probs().row(s).dot(q.row(s));
    MatrixXd next(mdp.n_states(), mdp.n_actions());
    for (int s = 0; s < mdp.n_states(); ++s) {
      for (int a = 0; a < mdp.n_actions(); ++a) {
        next(s, a) = (1.0 - mdp.gamma()) * r(s, a) +
                     mdp.gamma() * mdp.next_state_probs(s, a).dot(v);
      }
    }
    q = next;
  }
  return q;
}

/// Visitation by summing the discounted series of state distributions.
inline VectorXd visitation_by_series(const FiniteEmbeddedMDP& mdp,
                                     const TabularPolicy& pi, int terms) {
  VectorXd dist = mdp.initial();
  VectorXd total = VectorXd::Zero(mdp.n_states());
  double weight = 1.0 - mdp.gamma();
  for (int t = 0; t < terms; ++t) {
    total += weight * dist;
    VectorXd next = VectorXd::Zero(mdp.n_states());
    for (int s = 0; s < mdp.n_states(); ++s) {
      for (int a = 0; a < mdp.n_actions(); ++a) {
        next += dist[s] * pi(s, a) * mdp.next_state_probs(s, a).transpose();
      }
    }
    dist = next;
    weight *= mdp.gamma();
  }
  return total;
}

/// Central differences of f along the listed coordinates.
inline VectorXd central_differences(const std::function<double(const VectorXd&)>& f,
                                    const VectorXd& x, const std::vector<int>& coords,
                                    double eps) {
  VectorXd out(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) {
    VectorXd plus = x;
    VectorXd minus = x;
    plus[coords[i]] += eps;
    minus[coords[i]] -= eps;
    out[static_cast<Eigen::Index>(i)] = (f(plus) - f(minus)) / (2.0 * eps);
  }
  return out;
}

inline VectorXd gather(const VectorXd& v, const std::vector<int>& coords) {
  VectorXd out(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = v[coords[i]];
  }
  return out;
}

/// Coordinates of the neurons whose gate is at least `margin` away from
/// flipping on every input, so a perturbation of size < margin keeps all
/// gates fixed. Returns up to `limit` of them, chosen at random.
inline std::vector<int> kink_free_coords(const gail::TwoLayerNet& net,
                                         const std::vector<VectorXd>& inputs,
                                         double margin, int limit, Rng& rng) {
  const int d = net.input_dim();
  std::vector<int> coords;
  for (int l = 0; l < net.width(); ++l) {
    bool safe = true;
    for (const VectorXd& x : inputs) {
      double pre = 0.0;
      for (int i = 0; i < d; ++i) pre += x[i] * net.weights()[l * d + i];
      if (std::abs(pre) < margin) {
        safe = false;
        break;
      }
    }
    if (safe) {
      for (int i = 0; i < d; ++i) coords.push_back(l * d + i);
    }
  }
  std::shuffle(coords.begin(), coords.end(), rng);
  if (static_cast<int>(coords.size()) > limit) coords.resize(limit);
  return coords;
}

inline double rel_error(const VectorXd& a, const VectorXd& ref) {
  return (a - ref).norm() / std::max(ref.norm(), 1e-12);
}

}  // namespace testing_support
