#pragma once

#include <vector>

#include "gail/mdp.hpp"
#include "gail/network.hpp"

namespace gail {

/// π_θ(a|s) ∝ exp(τ u_θ(s, a)).
class EnergyPolicy {
 public:
  EnergyPolicy(TwoLayerNet net, double tau);

  const TwoLayerNet& net() const { return net_; }
  double tau() const { return tau_; }

  VectorXd action_probs(const FiniteEmbeddedMDP& mdp, int s) const;
  /// ι_θ(s, a) = φ_θ(s, a) - E_{a'~π(.|s)} φ_θ(s, a').
  VectorXd score(const FiniteEmbeddedMDP& mdp, int s, int a) const;
  int sample_action(const FiniteEmbeddedMDP& mdp, int s, Rng& rng) const;

 private:
  TwoLayerNet net_;
  double tau_;
};

/// Numerically stable softmax of τ times the given energies.
VectorXd softmax(const VectorXd& energies, double tau);

TabularPolicy policy_as_table(const EnergyPolicy& pol,
                              const FiniteEmbeddedMDP& mdp);

/// Features and action probabilities at every pair for one parameter vector,
/// so per-sample scores in a batch reuse the same feature evaluations.
class PolicyCache {
 public:
  PolicyCache(const EnergyPolicy& pol, const FiniteEmbeddedMDP& mdp);

  const MatrixXd& probs() const { return probs_; }
  /// φ_θ(s, a), one column per action of state s.
  const MatrixXd& state_features(int s) const { return features_[s]; }
  VectorXd score(int s, int a) const;
  TabularPolicy table() const { return TabularPolicy(probs_); }

 private:
  std::vector<MatrixXd> features_;
  std::vector<VectorXd> mean_features_;
  MatrixXd probs_;
};

/// r_β(s, a) = (1 - γ)^{-1} u_β(s, a).
class RewardNet {
 public:
  RewardNet(TwoLayerNet net, double gamma);

  const TwoLayerNet& net() const { return net_; }
  double scale() const { return scale_; }
  double value(const FiniteEmbeddedMDP& mdp, int s, int a) const;

 private:
  TwoLayerNet net_;
  double scale_;
};

MatrixXd reward_table(const RewardNet& rew, const FiniteEmbeddedMDP& mdp);

/// Q̂_ω(s, a) = u_ω(s, a).
class CriticNet {
 public:
  explicit CriticNet(TwoLayerNet net) : net_(std::move(net)) {}

  const TwoLayerNet& net() const { return net_; }
  TwoLayerNet& net() { return net_; }
  double value(const FiniteEmbeddedMDP& mdp, int s, int a) const;

 private:
  TwoLayerNet net_;
};

MatrixXd critic_table(const CriticNet& critic, const FiniteEmbeddedMDP& mdp);

}  // namespace gail
