#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gail/neural_td.hpp"
#include "gail/policy.hpp"
#include "gail/tabular.hpp"

namespace gail {

enum class Regularizer { kNone, kL2ToAnchor };

/// Center of the ball the NPG direction δ is searched over.
enum class DeltaBallCenter { kAnchor, kOrigin };

/// Coordinates in which θ_{k+1} = τ_{k+1}^{-1}(τ_k θ_k - η δ_k) is applied.
/// kAnchorRelative uses θ - W_0 and δ - center, which makes θ_{k+1} a convex
/// combination of θ_k and the reflected direction inside the θ-ball.
enum class ThetaUpdateFrame { kAnchorRelative, kAbsolute };

Regularizer parse_regularizer(const std::string& name);
DeltaBallCenter parse_delta_center(const std::string& name);
ThetaUpdateFrame parse_theta_frame(const std::string& name);
std::string to_string(Regularizer r);
std::string to_string(DeltaBallCenter c);
std::string to_string(ThetaUpdateFrame f);

struct NpgSolverConfig {
  int inner_iterations = 200;
  int power_iterations = 20;
  double ridge = 1e-8;
  int cr_max_iterations = 500;
  double cr_tolerance = 1e-10;
};

struct GailConfig {
  int iterations = 64;       ///< T
  double eta = 0.0;          ///< η; zero means 1/√T
  int batch_size = 64;       ///< N
  double lambda = 0.0;       ///< λ
  double radius_theta = -1;  ///< B_θ; negative means B_θ = B_ω
  double radius_beta = 1.0;  ///< B_β
  int width = 64;            ///< m
  InitScheme init = InitScheme::kSymmetric;
  TdConfig td;               ///< td.radius is B_ω
  Regularizer regularizer = Regularizer::kL2ToAnchor;
  DeltaBallCenter delta_center = DeltaBallCenter::kAnchor;
  ThetaUpdateFrame theta_frame = ThetaUpdateFrame::kAnchorRelative;
  NpgSolverConfig npg;
  std::uint64_t seed = 0;

  void validate() const;
  double resolved_eta() const;
  double resolved_radius_theta() const;
  double radius_omega() const { return td.radius; }
};

/// Empirical Fisher τ² N^{-1} Σ ι_i ι_iᵀ kept as its score vectors.
class FisherOperator {
 public:
  /// `scores` has one column per sample.
  FisherOperator(MatrixXd scores, double tau);

  VectorXd apply(const VectorXd& v) const;
  /// Dense matrix; refused above 2000 parameters.
  MatrixXd dense() const;
  Eigen::Index dim() const { return scores_.rows(); }
  int batch_size() const { return static_cast<int>(scores_.cols()); }

 private:
  MatrixXd scores_;
  double coeff_;
};

FisherOperator estimate_fisher(const PolicyCache& cache, double tau,
                               std::span<const StateAction> batch);
FisherOperator estimate_fisher(const EnergyPolicy& pol,
                               const FiniteEmbeddedMDP& mdp,
                               std::span<const StateAction> batch);

/// -τ/(N(1-γ)) Σ Q̂_ω(s_i, a_i) ι_θ(s_i, a_i).
VectorXd estimate_policy_grad(const PolicyCache& cache, double tau,
                              const CriticNet& critic,
                              const FiniteEmbeddedMDP& mdp,
                              std::span<const StateAction> batch);
VectorXd estimate_policy_grad(const EnergyPolicy& pol, const CriticNet& critic,
                              const FiniteEmbeddedMDP& mdp,
                              std::span<const StateAction> batch);

/// ∇ψ(β) for the configured regularizer.
VectorXd regularizer_grad(const TwoLayerNet& reward_net, Regularizer kind);
double regularizer_value(const TwoLayerNet& reward_net, Regularizer kind);

/// (N(1-γ))^{-1} Σ [φ_β(expert_i) - φ_β(policy_i)] - λ ∇ψ(β).
VectorXd estimate_reward_grad(const RewardNet& rew, const FiniteEmbeddedMDP& mdp,
                              std::span<const StateAction> expert_batch,
                              std::span<const StateAction> policy_batch,
                              double lambda, Regularizer kind);

// Population counterparts evaluated against exact visitation measures.
MatrixXd population_fisher(const PolicyCache& cache, double tau,
                           const MatrixXd& visitation);
VectorXd population_policy_grad(const PolicyCache& cache, double tau,
                                const MatrixXd& q_table,
                                const MatrixXd& visitation, double gamma);
VectorXd population_reward_grad(const RewardNet& rew,
                                const FiniteEmbeddedMDP& mdp,
                                const MatrixXd& expert_visitation,
                                const MatrixXd& policy_visitation,
                                double lambda, Regularizer kind);

/// L(θ, β) = J(π_E; r_β) - J(π_θ; r_β) - λ ψ(β), evaluated exactly.
double exact_objective(const FiniteEmbeddedMDP& mdp, const TabularPolicy& expert,
                       const EnergyPolicy& pol, const RewardNet& rew,
                       double lambda, Regularizer kind);

struct NpgSolution {
  VectorXd delta;
  double residual = 0.0;          ///< ‖Î δ - g‖ at the returned point
  double initial_residual = 0.0;  ///< same at the projected warm start
  int cr_iterations = 0;
};

/// Approximate argmin_{δ ∈ ball} ‖Î δ - g‖: conjugate-residual warm start on
/// (Î + ridge I) x = g, projection, power-iteration step size, then projected
/// gradient descent keeping the best iterate.
NpgSolution solve_npg_direction(const FisherOperator& fisher, const VectorXd& g,
                                const BallConstraint& ball,
                                const NpgSolverConfig& cfg);

struct PolicySnapshot {
  VectorXd theta;
  double tau = 0.0;
};

struct GailState {
  TwoLayerNet init;  ///< shared b and W_0
  VectorXd theta;
  double tau = 0.0;
  VectorXd beta;
  VectorXd omega;
  int k = 0;
  std::vector<PolicySnapshot> policy_history;
  int ball_violations = 0;

  static GailState initial(TwoLayerNet init);
  EnergyPolicy policy() const;
  RewardNet reward(double gamma) const;
};

struct ActorDiagnostics {
  double grad_norm = 0.0;
  double npg_residual = 0.0;
  bool ball_violation = false;
};

/// Policy half of the actor step: Fisher and gradient estimates, the NPG
/// solve, τ_{k+1} = (k + 1)·η with k read from `state.k`, and the θ update.
/// The returned state has k, β and the history untouched.
GailState actor_step(const GailState& state, const FiniteEmbeddedMDP& mdp,
                     const CriticNet& critic,
                     std::span<const StateAction> batch, const GailConfig& cfg,
                     ActorDiagnostics* diagnostics = nullptr);

/// β_{k+1} = Proj_{S_{B_β}}(β_k + η ĝ).
GailState reward_step(const GailState& state, const VectorXd& grad_hat,
                      const GailConfig& cfg);

struct MixedPolicy {
  std::vector<EnergyPolicy> components;
};

/// (1/T) Σ_k J(π_k; r).
double mixed_policy_value(const MixedPolicy& mp, const FiniteEmbeddedMDP& mdp,
                          const MatrixXd& reward);
/// (1/T) Σ_k ν_{π_k}.
MatrixXd mixed_visitation(const MixedPolicy& mp, const FiniteEmbeddedMDP& mdp);

struct MetricsRow {
  int k = 0;
  double tau = 0.0;
  double j_pi_r = 0.0;
  double j_expert_r = 0.0;
  double kl_to_expert = 0.0;
  double grad_theta_norm = 0.0;
  double grad_beta_norm = 0.0;
  double td_error = 0.0;
  double npg_residual = 0.0;
  int ball_violations = 0;
};

using RunMetrics = std::vector<MetricsRow>;

/// Header plus one LF-terminated row per iteration, 17 significant digits.
std::string metrics_csv(const RunMetrics& metrics);

struct GailResult {
  MixedPolicy policy;
  RunMetrics metrics;
  GailState final_state;
};

/// Algorithm driver. The expert table is only used for the diagnostic
/// columns (J_E_r, kl_to_expert); pass nullptr to leave them NaN.
GailResult run_gail(const FiniteEmbeddedMDP& mdp,
                    std::span<const StateAction> expert_data,
                    const GailConfig& cfg, Rng& rng,
                    const TabularPolicy* expert = nullptr);

}  // namespace gail
