#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "gail/common.hpp"

namespace gail {

/// A state-action index pair.
struct StateAction {
  int state = 0;
  int action = 0;
  friend bool operator==(const StateAction&, const StateAction&) = default;
};

/// One step of experience with the next action already chosen.
struct Transition {
  int state = 0;
  int action = 0;
  double reward = 0.0;
  int next_state = 0;
  int next_action = 0;
};

/// Finite MDP whose (state, action) pairs are embedded as points in the unit
/// ball of R^d. Pairs are flattened as `s * n_actions + a` throughout.
class FiniteEmbeddedMDP {
 public:
  /// `transition` has one row per flattened pair and one column per next
  /// state; `embedding` has one column per flattened pair. Throws ConfigError
  /// when any invariant is violated.
  FiniteEmbeddedMDP(int n_states, int n_actions, MatrixXd transition,
                    VectorXd initial, MatrixXd embedding, double gamma);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  int n_pairs() const { return n_states_ * n_actions_; }
  int dim() const { return static_cast<int>(embedding_.rows()); }
  double gamma() const { return gamma_; }

  const VectorXd& initial() const { return initial_; }
  const MatrixXd& transition() const { return transition_; }
  const MatrixXd& embedding() const { return embedding_; }

  int pair_index(int s, int a) const;
  /// Embedded point of (s, a); a column view into the embedding table.
  auto embed(int s, int a) const { return embedding_.col(pair_index(s, a)); }
  /// Next-state distribution P(. | s, a).
  auto next_state_probs(int s, int a) const {
    return transition_.row(pair_index(s, a));
  }

  void check_state(int s) const;
  void check_action(int a) const;

 private:
  int n_states_;
  int n_actions_;
  MatrixXd transition_;
  VectorXd initial_;
  MatrixXd embedding_;
  double gamma_;
};

/// Row-stochastic (n_states x n_actions) action table.
class TabularPolicy {
 public:
  explicit TabularPolicy(MatrixXd probs);
  static TabularPolicy uniform(int n_states, int n_actions);

  const MatrixXd& probs() const { return probs_; }
  int n_states() const { return static_cast<int>(probs_.rows()); }
  int n_actions() const { return static_cast<int>(probs_.cols()); }
  double operator()(int s, int a) const { return probs_(s, a); }
  int sample_action(int s, Rng& rng) const;

 private:
  MatrixXd probs_;
};

int step(const FiniteEmbeddedMDP& mdp, int s, int a, Rng& rng);

/// One draw from the discounted visitation measure ν_π via a geometric horizon.
StateAction sample_visitation(const FiniteEmbeddedMDP& mdp,
                              const TabularPolicy& pi, Rng& rng);

/// Runs the chain `burn_in` steps from ρ and returns the pair reached.
StateAction sample_stationary(const FiniteEmbeddedMDP& mdp,
                              const TabularPolicy& pi, Rng& rng, int burn_in);

/// Expert data as i.i.d. ν_E draws.
std::vector<StateAction> generate_expert_trajectory(
    const FiniteEmbeddedMDP& mdp, const TabularPolicy& expert, int count,
    Rng& rng);

/// A single long-running chain under π that hands out consecutive
/// (s, a, s', a') tuples after an initial burn-in.
class StationaryChain {
 public:
  StationaryChain(const FiniteEmbeddedMDP& mdp, const TabularPolicy& pi,
                  int burn_in, Rng& rng);
  /// Next tuple; reward is left at zero for the caller to fill in.
  Transition next(Rng& rng);

 private:
  const FiniteEmbeddedMDP* mdp_;
  const TabularPolicy* pi_;
  StateAction current_;
};

nlohmann::json mdp_to_json(const FiniteEmbeddedMDP& mdp);
FiniteEmbeddedMDP mdp_from_json(const nlohmann::json& doc);
FiniteEmbeddedMDP load_mdp(const std::filesystem::path& path);
void save_mdp(const FiniteEmbeddedMDP& mdp, const std::filesystem::path& path);

}  // namespace gail
