#pragma once

#include "gail/policy.hpp"

namespace gail {

/// How the (s, a) ~ ρ_π draws of neural TD are produced.
enum class TdSampling {
  kContinuingChain,  ///< one chain, burn-in once, then consecutive transitions
  kIid,              ///< a fresh burn-in for every transition
};

TdSampling parse_td_sampling(const std::string& name);
std::string to_string(TdSampling sampling);

struct TdConfig {
  int iterations = 1000;
  /// Stepsize α; zero means min{(1 - γ)/8, m^{-1/2}}. Negative is rejected.
  double alpha = 0.0;
  double radius = 1.0;
  int burn_in = 100;
  TdSampling sampling = TdSampling::kContinuingChain;

  void validate() const;
  double resolved_alpha(double gamma, int width) const;
};

double default_td_stepsize(double gamma, int width);

/// One projected semi-gradient step:
///   δ = Q̂(s, a) - (1 - γ) r - γ Q̂(s', a'),
///   ω ← Proj_ball(ω - α δ φ_ω(s, a)).
CriticNet td_step(CriticNet critic, const FiniteEmbeddedMDP& mdp,
                  const Transition& transition, double alpha,
                  const BallConstraint& ball);

/// Runs `cfg.iterations` TD steps from ω(0) = W_0 and returns the critic at
/// the iterate average (1/T) Σ_{j<T} ω(j).
CriticNet neural_td(const FiniteEmbeddedMDP& mdp, const TabularPolicy& pi,
                    const MatrixXd& reward, const TwoLayerNet& init,
                    const TdConfig& cfg, Rng& rng);

}  // namespace gail
