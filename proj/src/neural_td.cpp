#include "gail/neural_td.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace gail {

TdSampling parse_td_sampling(const std::string& name) {
  if (name == "chain") return TdSampling::kContinuingChain;
  if (name == "iid") return TdSampling::kIid;
  throw ConfigError("unknown TD sampling mode '" + name + "'");
}

std::string to_string(TdSampling sampling) {
  return sampling == TdSampling::kContinuingChain ? "chain" : "iid";
}

void TdConfig::validate() const {
  if (iterations < 1) throw ConfigError("TD iterations must be at least 1");
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw ConfigError("TD stepsize must be positive (or 0 for the default)");
  }
  if (!(radius >= 0.0)) throw ConfigError("TD radius must be nonnegative");
  if (burn_in < 0) throw ConfigError("TD burn_in must be nonnegative");
}

double default_td_stepsize(double gamma, int width) {
  return std::min((1.0 - gamma) / 8.0, 1.0 / std::sqrt(double(width)));
}

double TdConfig::resolved_alpha(double gamma, int width) const {
  return alpha > 0.0 ? alpha : default_td_stepsize(gamma, width);
}

CriticNet td_step(CriticNet critic, const FiniteEmbeddedMDP& mdp,
                  const Transition& tr, double alpha,
                  const BallConstraint& ball) {
  const TwoLayerNet& net = critic.net();
  const auto x = mdp.embed(tr.state, tr.action);
  const double q = net.forward(x);
  const double q_next = net.forward(mdp.embed(tr.next_state, tr.next_action));
  const double gamma = mdp.gamma();
  const double residual = q - (1.0 - gamma) * tr.reward - gamma * q_next;
  if (residual == 0.0 || alpha == 0.0) return critic;
  VectorXd w = net.weights() - (alpha * residual) * net.features(x);
  critic.net().set_weights(project_ball(w, ball));
  return critic;
}

CriticNet neural_td(const FiniteEmbeddedMDP& mdp, const TabularPolicy& pi,
                    const MatrixXd& reward, const TwoLayerNet& init,
                    const TdConfig& cfg, Rng& rng) {
  cfg.validate();
  if (reward.rows() != mdp.n_states() || reward.cols() != mdp.n_actions()) {
    throw std::invalid_argument("reward table shape does not match the MDP");
  }
  const double alpha = cfg.resolved_alpha(mdp.gamma(), init.width());
  const BallConstraint ball(init.anchor(), cfg.radius);
  CriticNet critic(init.with_weights(init.anchor()));
  VectorXd sum = VectorXd::Zero(init.num_params());

  std::optional<StationaryChain> chain;
  if (cfg.sampling == TdSampling::kContinuingChain) {
    chain.emplace(mdp, pi, cfg.burn_in, rng);
  }
  for (int j = 0; j < cfg.iterations; ++j) {
    sum += critic.net().weights();
    if (j + 1 == cfg.iterations) break;  // ω(T) is not part of the average
    Transition tr;
    if (chain) {
      tr = chain->next(rng);
    } else {
      const StateAction sa = sample_stationary(mdp, pi, rng, cfg.burn_in);
      tr.state = sa.state;
      tr.action = sa.action;
      tr.next_state = step(mdp, sa.state, sa.action, rng);
      tr.next_action = pi.sample_action(tr.next_state, rng);
    }
    tr.reward = reward(tr.state, tr.action);
    critic = td_step(std::move(critic), mdp, tr, alpha, ball);
  }
  critic.net().set_weights(sum / static_cast<double>(cfg.iterations));
  return critic;
}

}  // namespace gail
