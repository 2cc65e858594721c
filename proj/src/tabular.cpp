#include "gail/tabular.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace gail {

namespace {

void check_shapes(const FiniteEmbeddedMDP& mdp, const TabularPolicy& pi) {
  if (pi.n_states() != mdp.n_states() || pi.n_actions() != mdp.n_actions()) {
    throw std::invalid_argument("policy shape does not match the MDP");
  }
}

void check_reward(const FiniteEmbeddedMDP& mdp, const MatrixXd& reward) {
  if (reward.rows() != mdp.n_states() || reward.cols() != mdp.n_actions()) {
    throw std::invalid_argument("reward table shape does not match the MDP");
  }
}

// Row-major flattening of an (S x A) table into the pair ordering s*A + a.
VectorXd flatten(const MatrixXd& table) {
  VectorXd out(table.size());
  for (Eigen::Index s = 0; s < table.rows(); ++s) {
    for (Eigen::Index a = 0; a < table.cols(); ++a) {
      out[s * table.cols() + a] = table(s, a);
    }
  }
  return out;
}

MatrixXd unflatten(const VectorXd& flat, int n_states, int n_actions) {
  MatrixXd out(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) out(s, a) = flat[s * n_actions + a];
  }
  return out;
}

// Π: maps a pair vector Q to the state vector V(s) = Σ_a π(a|s) Q(s, a).
MatrixXd averaging_operator(const TabularPolicy& pi) {
  const int S = pi.n_states();
  const int A = pi.n_actions();
  MatrixXd avg = MatrixXd::Zero(S, S * A);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) avg(s, s * A + a) = pi(s, a);
  }
  return avg;
}

}  // namespace

MatrixXd state_kernel(const FiniteEmbeddedMDP& mdp, const TabularPolicy& pi) {
  check_shapes(mdp, pi);
  return averaging_operator(pi) * mdp.transition();
}

MatrixXd exact_q(const FiniteEmbeddedMDP& mdp, const TabularPolicy& pi,
                 const MatrixXd& reward) {
  check_shapes(mdp, pi);
  check_reward(mdp, reward);
  const int n = mdp.n_pairs();
  const double gamma = mdp.gamma();
  const MatrixXd system = MatrixXd::Identity(n, n) -
                          gamma * mdp.transition() * averaging_operator(pi);
  const VectorXd q = system.partialPivLu().solve((1.0 - gamma) * flatten(reward));
  return unflatten(q, mdp.n_states(), mdp.n_actions());
}

ExactQuantities exact_quantities(const FiniteEmbeddedMDP& mdp,
                                 const TabularPolicy& pi,
                                 const MatrixXd& reward) {
  ExactQuantities out;
  out.q_table = exact_q(mdp, pi, reward);
  out.v_table = pi.probs().cwiseProduct(out.q_table).rowwise().sum();
  out.a_table = out.q_table.colwise() - out.v_table;
  out.j_value = mdp.initial().dot(out.v_table);
  return out;
}

Visitation exact_visitation(const FiniteEmbeddedMDP& mdp,
                            const TabularPolicy& pi) {
  const MatrixXd kernel = state_kernel(mdp, pi);
  const int S = mdp.n_states();
  const double gamma = mdp.gamma();
  const MatrixXd system =
      MatrixXd::Identity(S, S) - gamma * kernel.transpose();
  Visitation out;
  out.state = (1.0 - gamma) * system.partialPivLu().solve(mdp.initial());
  out.pair = pi.probs().array().colwise() * out.state.array();
  return out;
}

Stationary exact_stationary(const FiniteEmbeddedMDP& mdp,
                            const TabularPolicy& pi) {
  const MatrixXd kernel = state_kernel(mdp, pi);
  const int S = mdp.n_states();

  if (S > 1) {
    Eigen::EigenSolver<MatrixXd> solver(kernel.transpose(), false);
    std::vector<double> moduli;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
      moduli.push_back(std::abs(solver.eigenvalues()[i]));
    }
    std::sort(moduli.begin(), moduli.end(), std::greater<>());
    if (moduli[1] >= 1.0 - 1e-8) {
      throw DegeneracyError(
          "stationary distribution is not unique or the chain does not mix "
          "(second eigenvalue modulus " + std::to_string(moduli[1]) + ")");
    }
  }

  // ϱ (P_π - I) = 0 with one equation swapped for Σ ϱ = 1.
  MatrixXd system = kernel.transpose() - MatrixXd::Identity(S, S);
  system.row(S - 1).setOnes();
  VectorXd rhs = VectorXd::Zero(S);
  rhs[S - 1] = 1.0;
  Stationary out;
  out.state = system.partialPivLu().solve(rhs);
  out.pair = pi.probs().array().colwise() * out.state.array();
  return out;
}

double exact_J(const FiniteEmbeddedMDP& mdp, const TabularPolicy& pi,
               const MatrixXd& reward) {
  return exact_quantities(mdp, pi, reward).j_value;
}

double bellman_residual(const FiniteEmbeddedMDP& mdp, const TabularPolicy& pi,
                        const MatrixXd& reward, const MatrixXd& q_table) {
  check_shapes(mdp, pi);
  check_reward(mdp, reward);
  const VectorXd q = flatten(q_table);
  const VectorXd next_value = averaging_operator(pi) * q;
  const VectorXd target = (1.0 - mdp.gamma()) * flatten(reward) +
                          mdp.gamma() * mdp.transition() * next_value;
  return (q - target).cwiseAbs().maxCoeff();
}

double cost_difference_residual(const FiniteEmbeddedMDP& mdp,
                                const TabularPolicy& expert,
                                const TabularPolicy& pi,
                                const MatrixXd& reward) {
  const double lhs = exact_J(mdp, expert, reward) - exact_J(mdp, pi, reward);
  const MatrixXd q = exact_q(mdp, pi, reward);
  const VectorXd d_expert = exact_visitation(mdp, expert).state;
  const VectorXd inner =
      q.cwiseProduct(expert.probs() - pi.probs()).rowwise().sum();
  const double rhs = d_expert.dot(inner) / (1.0 - mdp.gamma());
  return std::abs(lhs - rhs);
}

double expected_kl(const VectorXd& state_dist, const TabularPolicy& pi1,
                   const TabularPolicy& pi2) {
  if (pi1.n_states() != pi2.n_states() || pi1.n_actions() != pi2.n_actions() ||
      state_dist.size() != pi1.n_states()) {
    throw std::invalid_argument("expected_kl: shape mismatch");
  }
  double total = 0.0;
  for (int s = 0; s < pi1.n_states(); ++s) {
    if (state_dist[s] <= 0.0) continue;
    double kl = 0.0;
    for (int a = 0; a < pi1.n_actions(); ++a) {
      const double p = pi1(s, a);
      if (p <= 0.0) continue;
      const double q = pi2(s, a);
      if (q <= 0.0) {
        throw DivergenceError("KL is infinite: second policy has no mass at (" +
                              std::to_string(s) + ", " + std::to_string(a) +
                              ")");
      }
      kl += p * std::log(p / q);
    }
    total += state_dist[s] * kl;
  }
  return total;
}

MatrixXd optimal_q(const FiniteEmbeddedMDP& mdp, const MatrixXd& reward,
                   double tolerance) {
  check_reward(mdp, reward);
  const double gamma = mdp.gamma();
  const VectorXd base = (1.0 - gamma) * flatten(reward);
  VectorXd q = VectorXd::Zero(mdp.n_pairs());
  VectorXd best(mdp.n_states());
  for (;;) {
    for (int s = 0; s < mdp.n_states(); ++s) {
      best[s] = q.segment(s * mdp.n_actions(), mdp.n_actions()).maxCoeff();
    }
    const VectorXd next = base + gamma * mdp.transition() * best;
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = next;
    if (change <= tolerance) break;
  }
  return unflatten(q, mdp.n_states(), mdp.n_actions());
}

double weighted_l2(const MatrixXd& f, const MatrixXd& g, const MatrixXd& mu) {
  if (f.rows() != g.rows() || f.cols() != g.cols() || f.rows() != mu.rows() ||
      f.cols() != mu.cols()) {
    throw std::invalid_argument("weighted_l2: shape mismatch");
  }
  return std::sqrt((f - g).array().square().cwiseProduct(mu.array()).sum());
}

}  // namespace gail
