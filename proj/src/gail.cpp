#include "gail/gail.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace gail {

namespace {

constexpr Eigen::Index kMaxDenseFisher = 2000;

void check_batch(std::span<const StateAction> batch) {
  if (batch.empty()) throw std::invalid_argument("batch must be nonempty");
}

}  // namespace

Regularizer parse_regularizer(const std::string& name) {
  if (name == "none") return Regularizer::kNone;
  if (name == "l2-to-anchor") return Regularizer::kL2ToAnchor;
  throw ConfigError("unknown regularizer '" + name + "'");
}

DeltaBallCenter parse_delta_center(const std::string& name) {
  if (name == "anchor") return DeltaBallCenter::kAnchor;
  if (name == "origin") return DeltaBallCenter::kOrigin;
  throw ConfigError("unknown delta_ball_center '" + name + "'");
}

ThetaUpdateFrame parse_theta_frame(const std::string& name) {
  if (name == "anchor-relative") return ThetaUpdateFrame::kAnchorRelative;
  if (name == "absolute") return ThetaUpdateFrame::kAbsolute;
  throw ConfigError("unknown theta_update_frame '" + name + "'");
}

std::string to_string(Regularizer r) {
  return r == Regularizer::kNone ? "none" : "l2-to-anchor";
}

std::string to_string(DeltaBallCenter c) {
  return c == DeltaBallCenter::kAnchor ? "anchor" : "origin";
}

std::string to_string(ThetaUpdateFrame f) {
  return f == ThetaUpdateFrame::kAnchorRelative ? "anchor-relative" : "absolute";
}

void GailConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations T must be at least 1");
  if (!std::isfinite(eta) || eta < 0.0) {
    throw ConfigError("stepsize eta must be positive (or 0 for 1/sqrt(T))");
  }
  if (batch_size < 1) throw ConfigError("batch size N must be at least 1");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
  if (!(radius_beta >= 0.0)) throw ConfigError("B_beta must be nonnegative");
  if (std::isnan(radius_theta)) throw ConfigError("B_theta must be a number");
  if (width < 1) throw ConfigError("width m must be positive");
  if (init == InitScheme::kSymmetric && width % 2 != 0) {
    throw ConfigError("symmetric initialization needs an even width");
  }
  td.validate();
  if (npg.inner_iterations < 0 || npg.power_iterations < 1 ||
      npg.cr_max_iterations < 0 || !(npg.ridge >= 0.0)) {
    throw ConfigError("invalid NPG solver settings");
  }
}

double GailConfig::resolved_eta() const {
  return eta > 0.0 ? eta : 1.0 / std::sqrt(static_cast<double>(iterations));
}

double GailConfig::resolved_radius_theta() const {
  return radius_theta >= 0.0 ? radius_theta : td.radius;
}

FisherOperator::FisherOperator(MatrixXd scores, double tau)
    : scores_(std::move(scores)) {
  if (scores_.cols() < 1) throw std::invalid_argument("empty Fisher batch");
  coeff_ = tau * tau / static_cast<double>(scores_.cols());
}

VectorXd FisherOperator::apply(const VectorXd& v) const {
  if (v.size() != scores_.rows()) {
    throw std::invalid_argument("Fisher product: dimension mismatch");
  }
  const VectorXd projections = scores_.transpose() * v;
  return coeff_ * (scores_ * projections);
}

MatrixXd FisherOperator::dense() const {
  if (scores_.rows() > kMaxDenseFisher) {
    throw std::logic_error("refusing to densify a Fisher matrix above 2000 "
                           "parameters");
  }
  return coeff_ * (scores_ * scores_.transpose());
}

FisherOperator estimate_fisher(const PolicyCache& cache, double tau,
                               std::span<const StateAction> batch) {
  check_batch(batch);
  const Eigen::Index p = cache.state_features(0).rows();
  MatrixXd scores(p, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    scores.col(static_cast<Eigen::Index>(i)) =
        cache.score(batch[i].state, batch[i].action);
  }
  return FisherOperator(std::move(scores), tau);
}

FisherOperator estimate_fisher(const EnergyPolicy& pol,
                               const FiniteEmbeddedMDP& mdp,
                               std::span<const StateAction> batch) {
  return estimate_fisher(PolicyCache(pol, mdp), pol.tau(), batch);
}

VectorXd estimate_policy_grad(const PolicyCache& cache, double tau,
                              const CriticNet& critic,
                              const FiniteEmbeddedMDP& mdp,
                              std::span<const StateAction> batch) {
  check_batch(batch);
  VectorXd grad = VectorXd::Zero(cache.state_features(0).rows());
  for (const StateAction& sa : batch) {
    grad += critic.value(mdp, sa.state, sa.action) *
            cache.score(sa.state, sa.action);
  }
  return (-tau / (static_cast<double>(batch.size()) * (1.0 - mdp.gamma()))) *
         grad;
}

VectorXd estimate_policy_grad(const EnergyPolicy& pol, const CriticNet& critic,
                              const FiniteEmbeddedMDP& mdp,
                              std::span<const StateAction> batch) {
  return estimate_policy_grad(PolicyCache(pol, mdp), pol.tau(), critic, mdp,
                              batch);
}

VectorXd regularizer_grad(const TwoLayerNet& reward_net, Regularizer kind) {
  if (kind == Regularizer::kNone) {
    return VectorXd::Zero(reward_net.num_params());
  }
  return reward_net.weights() - reward_net.anchor();
}

double regularizer_value(const TwoLayerNet& reward_net, Regularizer kind) {
  if (kind == Regularizer::kNone) return 0.0;
  return 0.5 * (reward_net.weights() - reward_net.anchor()).squaredNorm();
}

VectorXd estimate_reward_grad(const RewardNet& rew, const FiniteEmbeddedMDP& mdp,
                              std::span<const StateAction> expert_batch,
                              std::span<const StateAction> policy_batch,
                              double lambda, Regularizer kind) {
  if (expert_batch.size() != policy_batch.size()) {
    throw std::invalid_argument("expert and policy batches differ in length");
  }
  check_batch(policy_batch);
  const TwoLayerNet& net = rew.net();
  VectorXd diff = VectorXd::Zero(net.num_params());
  for (std::size_t i = 0; i < policy_batch.size(); ++i) {
    diff += net.features(mdp.embed(expert_batch[i].state, expert_batch[i].action));
    diff -= net.features(mdp.embed(policy_batch[i].state, policy_batch[i].action));
  }
  VectorXd grad = (rew.scale() / static_cast<double>(policy_batch.size())) * diff;
  if (kind != Regularizer::kNone && lambda != 0.0) {
    grad -= lambda * regularizer_grad(net, kind);
  }
  return grad;
}

MatrixXd population_fisher(const PolicyCache& cache, double tau,
                           const MatrixXd& visitation) {
  const Eigen::Index p = cache.state_features(0).rows();
  MatrixXd out = MatrixXd::Zero(p, p);
  for (Eigen::Index s = 0; s < visitation.rows(); ++s) {
    for (Eigen::Index a = 0; a < visitation.cols(); ++a) {
      const VectorXd iota = cache.score(static_cast<int>(s), static_cast<int>(a));
      out.noalias() += visitation(s, a) * iota * iota.transpose();
    }
  }
  return tau * tau * out;
}

VectorXd population_policy_grad(const PolicyCache& cache, double tau,
                                const MatrixXd& q_table,
                                const MatrixXd& visitation, double gamma) {
  VectorXd out = VectorXd::Zero(cache.state_features(0).rows());
  for (Eigen::Index s = 0; s < visitation.rows(); ++s) {
    for (Eigen::Index a = 0; a < visitation.cols(); ++a) {
      out += visitation(s, a) * q_table(s, a) *
             cache.score(static_cast<int>(s), static_cast<int>(a));
    }
  }
  return (-tau / (1.0 - gamma)) * out;
}

VectorXd population_reward_grad(const RewardNet& rew,
                                const FiniteEmbeddedMDP& mdp,
                                const MatrixXd& expert_visitation,
                                const MatrixXd& policy_visitation,
                                double lambda, Regularizer kind) {
  const TwoLayerNet& net = rew.net();
  VectorXd out = VectorXd::Zero(net.num_params());
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const double w = expert_visitation(s, a) - policy_visitation(s, a);
      if (w != 0.0) out += w * net.features(mdp.embed(s, a));
    }
  }
  out *= rew.scale();
  if (kind != Regularizer::kNone && lambda != 0.0) {
    out -= lambda * regularizer_grad(net, kind);
  }
  return out;
}

double exact_objective(const FiniteEmbeddedMDP& mdp, const TabularPolicy& expert,
                       const EnergyPolicy& pol, const RewardNet& rew,
                       double lambda, Regularizer kind) {
  const MatrixXd r = reward_table(rew, mdp);
  return exact_J(mdp, expert, r) - exact_J(mdp, policy_as_table(pol, mdp), r) -
         lambda * regularizer_value(rew.net(), kind);
}

namespace {

// Conjugate residual on the symmetric system (Î + ridge I) x = b from x = 0.
VectorXd conjugate_residual(const FisherOperator& fisher, const VectorXd& b,
                            const NpgSolverConfig& cfg, int* iterations) {
  auto op = [&](const VectorXd& v) -> VectorXd {
    return fisher.apply(v) + cfg.ridge * v;
  };
  VectorXd x = VectorXd::Zero(b.size());
  const double b_norm = b.norm();
  *iterations = 0;
  if (b_norm == 0.0) return x;
  VectorXd r = b;
  VectorXd p = r;
  VectorXd ar = op(r);
  VectorXd ap = ar;
  double r_ar = r.dot(ar);
  for (int it = 0; it < cfg.cr_max_iterations; ++it) {
    const double ap_sq = ap.squaredNorm();
    if (ap_sq <= 0.0 || r_ar <= 0.0) break;
    const double alpha = r_ar / ap_sq;
    x += alpha * p;
    r -= alpha * ap;
    *iterations = it + 1;
    if (r.norm() <= cfg.cr_tolerance * b_norm) break;
    ar = op(r);
    const double next_r_ar = r.dot(ar);
    const double beta = next_r_ar / r_ar;
    r_ar = next_r_ar;
    p = r + beta * p;
    ap = ar + beta * ap;
  }
  return x;
}

double largest_eigenvalue(const FisherOperator& fisher, int iterations) {
  // Fixed-seed start vector keeps the solve deterministic.
  Rng local(0x5eed);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd v(fisher.dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(local);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    VectorXd w = fisher.apply(v);
    lambda = w.norm();
    if (lambda == 0.0) return 0.0;
    v = w / lambda;
  }
  return lambda;
}

}  // namespace

NpgSolution solve_npg_direction(const FisherOperator& fisher, const VectorXd& g,
                                const BallConstraint& ball,
                                const NpgSolverConfig& cfg) {
  if (g.size() != fisher.dim() || ball.anchor.size() != fisher.dim()) {
    throw std::invalid_argument("NPG solve: dimension mismatch");
  }
  auto residual_of = [&](const VectorXd& delta) {
    return (fisher.apply(delta) - g).norm();
  };
  NpgSolution out;
  const VectorXd warm = conjugate_residual(fisher, g, cfg, &out.cr_iterations);
  out.delta = project_ball(warm, ball);
  out.initial_residual = residual_of(out.delta);
  out.residual = out.initial_residual;

  const double top = largest_eigenvalue(fisher, cfg.power_iterations);
  if (top <= 0.0) return out;
  const double step = 1.0 / (top * top);
  VectorXd delta = out.delta;
  for (int it = 0; it < cfg.inner_iterations; ++it) {
    const VectorXd grad = fisher.apply(fisher.apply(delta) - g);
    delta = project_ball(delta - step * grad, ball);
    const double res = residual_of(delta);
    if (res < out.residual) {
      out.residual = res;
      out.delta = delta;
    }
  }
  return out;
}

GailState GailState::initial(TwoLayerNet init) {
  const VectorXd anchor = init.anchor();
  return GailState{std::move(init), anchor, 0.0, anchor, anchor, 0, {}, 0};
}

EnergyPolicy GailState::policy() const {
  return EnergyPolicy(init.with_weights(theta), tau);
}

RewardNet GailState::reward(double gamma) const {
  return RewardNet(init.with_weights(beta), gamma);
}

namespace {

GailState actor_step_cached(const GailState& state, const FiniteEmbeddedMDP& mdp,
                            const PolicyCache& cache, const CriticNet& critic,
                            std::span<const StateAction> batch,
                            const GailConfig& cfg,
                            ActorDiagnostics* diagnostics) {
  const double eta = cfg.resolved_eta();
  const double radius = cfg.resolved_radius_theta();
  const VectorXd& anchor = state.init.anchor();

  const FisherOperator fisher = estimate_fisher(cache, state.tau, batch);
  const VectorXd grad =
      estimate_policy_grad(cache, state.tau, critic, mdp, batch);
  const VectorXd center = cfg.delta_center == DeltaBallCenter::kAnchor
                              ? anchor
                              : VectorXd::Zero(anchor.size());
  const NpgSolution npg = solve_npg_direction(
      fisher, state.tau * grad, BallConstraint(center, radius), cfg.npg);

  GailState next = state;
  // k·η rather than τ_k + η, so τ_k = k·η holds bitwise
  next.tau = static_cast<double>(state.k + 1) * eta;
  if (cfg.theta_frame == ThetaUpdateFrame::kAnchorRelative) {
    next.theta = anchor + (state.tau * (state.theta - anchor) -
                           eta * (npg.delta - center)) /
                              next.tau;
  } else {
    next.theta = (state.tau * state.theta - eta * npg.delta) / next.tau;
  }
  const BallConstraint theta_ball(anchor, radius);
  const bool violated = !theta_ball.contains(next.theta);
  if (violated) {
    ++next.ball_violations;
    next.theta = project_ball(next.theta, theta_ball);
  }
  if (!next.theta.allFinite()) {
    throw NumericalError("policy parameter became non-finite");
  }
  if (diagnostics != nullptr) {
    diagnostics->grad_norm = grad.norm();
    diagnostics->npg_residual = npg.residual;
    diagnostics->ball_violation = violated;
  }
  return next;
}

}  // namespace

GailState actor_step(const GailState& state, const FiniteEmbeddedMDP& mdp,
                     const CriticNet& critic,
                     std::span<const StateAction> batch, const GailConfig& cfg,
                     ActorDiagnostics* diagnostics) {
  const PolicyCache cache(state.policy(), mdp);
  return actor_step_cached(state, mdp, cache, critic, batch, cfg, diagnostics);
}

GailState reward_step(const GailState& state, const VectorXd& grad_hat,
                      const GailConfig& cfg) {
  GailState next = state;
  const BallConstraint ball(state.init.anchor(), cfg.radius_beta);
  next.beta = project_ball(state.beta + cfg.resolved_eta() * grad_hat, ball);
  if (!next.beta.allFinite()) {
    throw NumericalError("reward parameter became non-finite");
  }
  return next;
}

double mixed_policy_value(const MixedPolicy& mp, const FiniteEmbeddedMDP& mdp,
                          const MatrixXd& reward) {
  if (mp.components.empty()) throw std::invalid_argument("empty mixed policy");
  double total = 0.0;
  for (const EnergyPolicy& pol : mp.components) {
    total += exact_J(mdp, policy_as_table(pol, mdp), reward);
  }
  return total / static_cast<double>(mp.components.size());
}

MatrixXd mixed_visitation(const MixedPolicy& mp, const FiniteEmbeddedMDP& mdp) {
  if (mp.components.empty()) throw std::invalid_argument("empty mixed policy");
  MatrixXd total = MatrixXd::Zero(mdp.n_states(), mdp.n_actions());
  for (const EnergyPolicy& pol : mp.components) {
    total += exact_visitation(mdp, policy_as_table(pol, mdp)).pair;
  }
  return total / static_cast<double>(mp.components.size());
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::string metrics_csv(const RunMetrics& metrics) {
  std::string out =
      "k,tau,J_pi_r,J_E_r,kl_to_expert,grad_theta_norm,grad_beta_norm,"
      "td_error,npg_residual,ball_violations\n";
  for (const MetricsRow& row : metrics) {
    out += std::to_string(row.k);
    for (double v : {row.tau, row.j_pi_r, row.j_expert_r, row.kl_to_expert,
                     row.grad_theta_norm, row.grad_beta_norm, row.td_error,
                     row.npg_residual}) {
      out += ',';
      append_number(out, v);
    }
    out += ',';
    out += std::to_string(row.ball_violations);
    out += '\n';
  }
  return out;
}

GailResult run_gail(const FiniteEmbeddedMDP& mdp,
                    std::span<const StateAction> expert_data,
                    const GailConfig& cfg, Rng& rng,
                    const TabularPolicy* expert) {
  cfg.validate();
  if (expert_data.empty()) throw ConfigError("expert data must be nonempty");
  for (const StateAction& sa : expert_data) {
    mdp.check_state(sa.state);
    mdp.check_action(sa.action);
  }

  const double gamma = mdp.gamma();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  GailState state = GailState::initial(
      TwoLayerNet::init(cfg.width, mdp.dim(), cfg.init, rng));
  const VectorXd expert_state_visitation =
      expert != nullptr ? exact_visitation(mdp, *expert).state : VectorXd();

  GailResult result{MixedPolicy{}, RunMetrics{}, state};
  const auto n = static_cast<std::size_t>(cfg.batch_size);
  std::uniform_int_distribution<std::size_t> pick_expert(0,
                                                         expert_data.size() - 1);
  std::vector<StateAction> batch(n);
  std::vector<StateAction> expert_batch(n);

  for (int k = 0; k < cfg.iterations; ++k) {
    const EnergyPolicy policy = state.policy();
    const PolicyCache cache(policy, mdp);
    const TabularPolicy table = cache.table();
    const RewardNet reward = state.reward(gamma);
    const MatrixXd r_table = reward_table(reward, mdp);

    // critic
    const CriticNet critic = neural_td(mdp, table, r_table, state.init, cfg.td, rng);
    state.omega = critic.net().weights();

    // batches from ν_k and the expert data
    for (std::size_t i = 0; i < n; ++i) batch[i] = sample_visitation(mdp, table, rng);
    for (std::size_t i = 0; i < n; ++i) {
      expert_batch[i] = expert_data[pick_expert(rng)];
    }
    const VectorXd grad_beta = estimate_reward_grad(
        reward, mdp, expert_batch, batch, cfg.lambda, cfg.regularizer);

    ActorDiagnostics diag;
    GailState next =
        actor_step_cached(state, mdp, cache, critic, batch, cfg, &diag);
    next = reward_step(next, grad_beta, cfg);

    MetricsRow row;
    row.k = k;
    row.tau = state.tau;
    const ExactQuantities exact = exact_quantities(mdp, table, r_table);
    row.j_pi_r = exact.j_value;
    if (expert != nullptr) {
      row.j_expert_r = exact_J(mdp, *expert, r_table);
      row.kl_to_expert = expected_kl(expert_state_visitation, *expert, table);
    } else {
      row.j_expert_r = nan;
      row.kl_to_expert = nan;
    }
    row.grad_theta_norm = diag.grad_norm;
    row.grad_beta_norm = grad_beta.norm();
    try {
      const Stationary stationary = exact_stationary(mdp, table);
      row.td_error = weighted_l2(critic_table(critic, mdp), exact.q_table,
                                 stationary.pair);
    } catch (const DegeneracyError&) {
      row.td_error = nan;
    }
    row.npg_residual = diag.npg_residual;
    row.ball_violations = next.ball_violations;
    result.metrics.push_back(row);

    result.policy.components.push_back(policy);
    next.policy_history.push_back({state.theta, state.tau});
    next.k = k + 1;
    state = std::move(next);
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace gail
