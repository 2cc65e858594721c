#include "gail/policy.hpp"

#include <cmath>

namespace gail {

EnergyPolicy::EnergyPolicy(TwoLayerNet net, double tau)
    : net_(std::move(net)), tau_(tau) {
  if (!(tau_ >= 0.0) || !std::isfinite(tau_)) {
    throw ConfigError("inverse temperature must be finite and nonnegative");
  }
}

VectorXd softmax(const VectorXd& energies, double tau) {
  const VectorXd logits = tau * energies;
  const VectorXd shifted = (logits.array() - logits.maxCoeff()).exp();
  return shifted / shifted.sum();
}

VectorXd EnergyPolicy::action_probs(const FiniteEmbeddedMDP& mdp, int s) const {
  mdp.check_state(s);
  VectorXd energies(mdp.n_actions());
  for (int a = 0; a < mdp.n_actions(); ++a) {
    energies[a] = net_.forward(mdp.embed(s, a));
  }
  return softmax(energies, tau_);
}

VectorXd EnergyPolicy::score(const FiniteEmbeddedMDP& mdp, int s, int a) const {
  mdp.check_action(a);
  const VectorXd probs = action_probs(mdp, s);
  VectorXd mean = VectorXd::Zero(net_.num_params());
  VectorXd own;
  for (int b = 0; b < mdp.n_actions(); ++b) {
    VectorXd phi = net_.features(mdp.embed(s, b));
    mean += probs[b] * phi;
    if (b == a) own = std::move(phi);
  }
  return own - mean;
}

int EnergyPolicy::sample_action(const FiniteEmbeddedMDP& mdp, int s,
                                Rng& rng) const {
  return sample_categorical(action_probs(mdp, s), rng);
}

TabularPolicy policy_as_table(const EnergyPolicy& pol,
                              const FiniteEmbeddedMDP& mdp) {
  MatrixXd probs(mdp.n_states(), mdp.n_actions());
  for (int s = 0; s < mdp.n_states(); ++s) {
    probs.row(s) = pol.action_probs(mdp, s).transpose();
  }
  return TabularPolicy(std::move(probs));
}

PolicyCache::PolicyCache(const EnergyPolicy& pol, const FiniteEmbeddedMDP& mdp)
    : probs_(mdp.n_states(), mdp.n_actions()) {
  const TwoLayerNet& net = pol.net();
  features_.reserve(static_cast<std::size_t>(mdp.n_states()));
  mean_features_.reserve(static_cast<std::size_t>(mdp.n_states()));
  for (int s = 0; s < mdp.n_states(); ++s) {
    MatrixXd feats(net.num_params(), mdp.n_actions());
    VectorXd energies(mdp.n_actions());
    for (int a = 0; a < mdp.n_actions(); ++a) {
      feats.col(a) = net.features(mdp.embed(s, a));
      energies[a] = net.forward(mdp.embed(s, a));
    }
    const VectorXd p = softmax(energies, pol.tau());
    probs_.row(s) = p.transpose();
    mean_features_.push_back(feats * p);
    features_.push_back(std::move(feats));
  }
}

VectorXd PolicyCache::score(int s, int a) const {
  return features_.at(static_cast<std::size_t>(s)).col(a) -
         mean_features_[static_cast<std::size_t>(s)];
}

RewardNet::RewardNet(TwoLayerNet net, double gamma)
    : net_(std::move(net)), scale_(1.0 / (1.0 - gamma)) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("discount must lie in (0, 1)");
  }
}

double RewardNet::value(const FiniteEmbeddedMDP& mdp, int s, int a) const {
  return scale_ * net_.forward(mdp.embed(s, a));
}

MatrixXd reward_table(const RewardNet& rew, const FiniteEmbeddedMDP& mdp) {
  MatrixXd table(mdp.n_states(), mdp.n_actions());
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) table(s, a) = rew.value(mdp, s, a);
  }
  return table;
}

double CriticNet::value(const FiniteEmbeddedMDP& mdp, int s, int a) const {
  return net_.forward(mdp.embed(s, a));
}

MatrixXd critic_table(const CriticNet& critic, const FiniteEmbeddedMDP& mdp) {
  MatrixXd table(mdp.n_states(), mdp.n_actions());
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      table(s, a) = critic.value(mdp, s, a);
    }
  }
  return table;
}

}  // namespace gail
