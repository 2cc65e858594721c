#pragma once

#include "gail/mdp.hpp"

// Closed-form values of everything the learning code estimates. Rewards are
// (n_states x n_actions) tables and all value functions carry the (1 - γ)
// normalization, so a constant reward c has Q ≡ V ≡ J ≡ c.

namespace gail {

struct ExactQuantities {
  MatrixXd q_table;
  VectorXd v_table;
  MatrixXd a_table;
  double j_value = 0.0;
};

/// Discounted visitation: state measure d_π and pair measure ν_π = d_π π.
struct Visitation {
  VectorXd state;
  MatrixXd pair;
};

/// Stationary distribution ϱ_π over states and ρ_π = ϱ_π π over pairs.
struct Stationary {
  VectorXd state;
  MatrixXd pair;
};

/// State-to-state kernel P_π(s, s') = Σ_a π(a|s) P(s'|s, a).
MatrixXd state_kernel(const FiniteEmbeddedMDP& mdp, const TabularPolicy& pi);

/// Solves Q = (1-γ) r + γ P Π Q by a dense LU factorization.
MatrixXd exact_q(const FiniteEmbeddedMDP& mdp, const TabularPolicy& pi,
                 const MatrixXd& reward);

ExactQuantities exact_quantities(const FiniteEmbeddedMDP& mdp,
                                 const TabularPolicy& pi,
                                 const MatrixXd& reward);

Visitation exact_visitation(const FiniteEmbeddedMDP& mdp,
                            const TabularPolicy& pi);

/// Throws DegeneracyError when the second-largest eigenvalue modulus of P_π
/// is within 1e-8 of one.
Stationary exact_stationary(const FiniteEmbeddedMDP& mdp,
                            const TabularPolicy& pi);

double exact_J(const FiniteEmbeddedMDP& mdp, const TabularPolicy& pi,
               const MatrixXd& reward);

/// Largest entrywise violation of Q = (1-γ) r + γ E[Q(s', a')].
double bellman_residual(const FiniteEmbeddedMDP& mdp, const TabularPolicy& pi,
                        const MatrixXd& reward, const MatrixXd& q_table);

/// |J(π_E; r) - J(π; r) - (1-γ)^{-1} E_{d_E}<Q^π_r(s,.), π_E(.|s) - π(.|s)>|.
double cost_difference_residual(const FiniteEmbeddedMDP& mdp,
                                const TabularPolicy& expert,
                                const TabularPolicy& pi,
                                const MatrixXd& reward);

/// E_{s~μ} KL(π1(.|s) || π2(.|s)). Throws DivergenceError when π1 puts mass
/// where π2 has none at a state μ charges.
double expected_kl(const VectorXd& state_dist, const TabularPolicy& pi1,
                   const TabularPolicy& pi2);

/// Optimal normalized action values by value iteration to the given sup-norm
/// tolerance.
MatrixXd optimal_q(const FiniteEmbeddedMDP& mdp, const MatrixXd& reward,
                   double tolerance);

/// ‖f - g‖ in L2(μ) for pair tables f, g and a pair distribution μ.
double weighted_l2(const MatrixXd& f, const MatrixXd& g, const MatrixXd& mu);

}  // namespace gail
