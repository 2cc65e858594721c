#pragma once

#include <json.hpp>

#include "gail/gail.hpp"

namespace gail {

struct PgaConfig {
  int steps = 500;
  double step_scale = 0.1;  ///< step at iteration i is step_scale / sqrt(i)
};

struct RDistanceReport {
  double value_pga = 0.0;
  double value_linearized = 0.0;
  VectorXd argmax_beta;
  VectorXd argmax_linearized;
  int n_restarts = 0;
};

/// f(β') = J(π_E; r_β') - J(π̄; r_β') = <ν_E - ν̄, r_β'>.
double rdistance_objective(const FiniteEmbeddedMDP& mdp,
                           const TwoLayerNet& reward_net,
                           const MatrixXd& visitation_gap);

/// Estimates max_{β' ∈ S_{B_β}} J(π_E; r_β') - J(π̄; r_β') two ways:
/// multi-restart projected gradient ascent on the exact objective (restart 0
/// starts at W_0, the rest at uniform ball points; the lowest index wins
/// ties) and the closed-form maximizer with features frozen at W_0.
RDistanceReport r_distance(const FiniteEmbeddedMDP& mdp,
                           const TabularPolicy& expert, const MixedPolicy& mp,
                           double radius_beta, const TwoLayerNet& init,
                           int n_restarts, Rng& rng,
                           const PgaConfig& pga = PgaConfig{});

/// Same as above with the mixed visitation measure precomputed.
RDistanceReport r_distance_from_visitation(const FiniteEmbeddedMDP& mdp,
                                           const MatrixXd& expert_visitation,
                                           const MatrixXd& mixed_visitation,
                                           double radius_beta,
                                           const TwoLayerNet& init,
                                           int n_restarts, Rng& rng,
                                           const PgaConfig& pga = PgaConfig{});

nlohmann::json report_to_json(const RDistanceReport& report);

struct ConvergenceSummary {
  double first_quarter_mean = 0.0;
  double last_quarter_mean = 0.0;
  double min_gap = 0.0;
  int argmin = 0;
  int iterations = 0;
};

/// Summarizes the per-iteration gap J_E_r - J_pi_r; needs at least 8 rows.
ConvergenceSummary convergence_summary(const RunMetrics& metrics);
ConvergenceSummary convergence_summary(const std::vector<double>& gaps);

nlohmann::json summary_to_json(const ConvergenceSummary& summary);

}  // namespace gail
