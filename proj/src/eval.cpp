#include "gail/eval.hpp"

#include <cmath>

namespace gail {

double rdistance_objective(const FiniteEmbeddedMDP& mdp,
                           const TwoLayerNet& reward_net,
                           const MatrixXd& visitation_gap) {
  const double scale = 1.0 / (1.0 - mdp.gamma());
  double total = 0.0;
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const double w = visitation_gap(s, a);
      if (w != 0.0) total += w * reward_net.forward(mdp.embed(s, a));
    }
  }
  return scale * total;
}

namespace {

VectorXd objective_gradient(const FiniteEmbeddedMDP& mdp,
                            const TwoLayerNet& reward_net,
                            const MatrixXd& visitation_gap) {
  VectorXd grad = VectorXd::Zero(reward_net.num_params());
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const double w = visitation_gap(s, a);
      if (w != 0.0) grad += w * reward_net.features(mdp.embed(s, a));
    }
  }
  return grad / (1.0 - mdp.gamma());
}

struct AscentResult {
  double value;
  VectorXd beta;
};

AscentResult projected_ascent(const FiniteEmbeddedMDP& mdp, TwoLayerNet net,
                              const MatrixXd& gap, const BallConstraint& ball,
                              const PgaConfig& pga) {
  AscentResult best{rdistance_objective(mdp, net, gap), net.weights()};
  for (int it = 1; it <= pga.steps; ++it) {
    const VectorXd grad = objective_gradient(mdp, net, gap);
    const double step = pga.step_scale / std::sqrt(static_cast<double>(it));
    net.set_weights(project_ball(net.weights() + step * grad, ball));
    const double value = rdistance_objective(mdp, net, gap);
    if (value > best.value) best = {value, net.weights()};
  }
  return best;
}

}  // namespace

RDistanceReport r_distance_from_visitation(const FiniteEmbeddedMDP& mdp,
                                           const MatrixXd& expert_visitation,
                                           const MatrixXd& mixed_visitation,
                                           double radius_beta,
                                           const TwoLayerNet& init,
                                           int n_restarts, Rng& rng,
                                           const PgaConfig& pga) {
  if (n_restarts < 1) throw ConfigError("n_restarts must be at least 1");
  const BallConstraint ball(init.anchor(), radius_beta);
  const MatrixXd gap = expert_visitation - mixed_visitation;
  const TwoLayerNet at_anchor = init.with_weights(init.anchor());

  RDistanceReport report;
  report.n_restarts = n_restarts;
  for (int restart = 0; restart < n_restarts; ++restart) {
    VectorXd start = restart == 0
                         ? init.anchor()
                         : sample_uniform_ball(init.anchor(), radius_beta, rng);
    const AscentResult res =
        projected_ascent(mdp, init.with_weights(std::move(start)), gap, ball, pga);
    if (restart == 0 || res.value > report.value_pga) {
      report.value_pga = res.value;
      report.argmax_beta = res.beta;
    }
  }

  // frozen features: f(β') ≈ f(W_0) + <β' - W_0, g>, maximized on the sphere
  const VectorXd g = objective_gradient(mdp, at_anchor, gap);
  const double g_norm = g.norm();
  report.value_linearized =
      rdistance_objective(mdp, at_anchor, gap) + radius_beta * g_norm;
  report.argmax_linearized = init.anchor();
  if (g_norm > 0.0) report.argmax_linearized += (radius_beta / g_norm) * g;
  return report;
}

RDistanceReport r_distance(const FiniteEmbeddedMDP& mdp,
                           const TabularPolicy& expert, const MixedPolicy& mp,
                           double radius_beta, const TwoLayerNet& init,
                           int n_restarts, Rng& rng, const PgaConfig& pga) {
  return r_distance_from_visitation(mdp, exact_visitation(mdp, expert).pair,
                                    mixed_visitation(mp, mdp), radius_beta,
                                    init, n_restarts, rng, pga);
}

nlohmann::json report_to_json(const RDistanceReport& report) {
  return {
      {"value_pga", report.value_pga},
      {"value_linearized", report.value_linearized},
      {"n_restarts", report.n_restarts},
      {"argmax_beta", to_std(report.argmax_beta)},
      {"argmax_linearized", to_std(report.argmax_linearized)},
  };
}

ConvergenceSummary convergence_summary(const std::vector<double>& gaps) {
  const int n = static_cast<int>(gaps.size());
  if (n < 8) {
    throw std::invalid_argument("convergence summary needs at least 8 iterations");
  }
  const int quarter = n / 4;
  ConvergenceSummary out;
  out.iterations = n;
  double first = 0.0;
  double last = 0.0;
  for (int i = 0; i < quarter; ++i) {
    first += gaps[i];
    last += gaps[n - quarter + i];
  }
  out.first_quarter_mean = first / quarter;
  out.last_quarter_mean = last / quarter;
  out.min_gap = gaps[0];
  out.argmin = 0;
  for (int i = 1; i < n; ++i) {
    if (gaps[i] < out.min_gap) {
      out.min_gap = gaps[i];
      out.argmin = i;
    }
  }
  return out;
}

ConvergenceSummary convergence_summary(const RunMetrics& metrics) {
  std::vector<double> gaps;
  gaps.reserve(metrics.size());
  for (const MetricsRow& row : metrics) gaps.push_back(row.j_expert_r - row.j_pi_r);
  return convergence_summary(gaps);
}

nlohmann::json summary_to_json(const ConvergenceSummary& summary) {
  return {
      {"first_quarter_mean_gap", summary.first_quarter_mean},
      {"last_quarter_mean_gap", summary.last_quarter_mean},
      {"min_gap", summary.min_gap},
      {"argmin", summary.argmin},
      {"iterations", summary.iterations},
  };
}

}  // namespace gail
