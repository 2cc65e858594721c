#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gail/mdp.hpp"

namespace gail {

struct GeneratorParams {
  int n_states = 5;
  int n_actions = 3;
  int dim = 4;
  double gamma = 0.9;
  double mixing = 0.05;  ///< weight of the uniform kernel mixed into every row
  std::uint64_t seed = 0;
};

/// n uniform points in the unit ball of R^d, rescaled so the largest norm is
/// exactly 1. Returned as a d x n matrix.
MatrixXd random_embedding(int dim, int n, Rng& rng);

/// Random kernel rows mixed with `mixing` x uniform, random initial
/// distribution, random embedding.
FiniteEmbeddedMDP generate_mdp(const GeneratorParams& params);

/// Hidden reward table with entries uniform in [0, 1).
MatrixXd hidden_reward(int n_states, int n_actions, std::uint64_t seed);

/// Softmax(Q*/temperature) for Q* from value iteration on the hidden reward.
TabularPolicy make_expert(const FiniteEmbeddedMDP& mdp,
                          const MatrixXd& hidden_reward, double temperature,
                          double tolerance = 1e-10);

/// A reference environment with its frozen hidden reward.
struct BundledEnvironment {
  std::string name;
  FiniteEmbeddedMDP mdp;
  MatrixXd hidden_reward;
};

/// `single_state` (1 state, 2 actions), `chain4` (4 states, left/right) and
/// `grid3x3` (9 cells, 4 moves). Throws ConfigError for unknown names.
BundledEnvironment bundled_environment(const std::string& name);
std::vector<std::string> bundled_names();

/// Embedded points of every pair, in pair order.
std::vector<VectorXd> embedded_points(const FiniteEmbeddedMDP& mdp);

}  // namespace gail
