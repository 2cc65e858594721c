#include "gail/environments.hpp"

#include <cmath>

#include "gail/policy.hpp"
#include "gail/tabular.hpp"

namespace gail {

MatrixXd random_embedding(int dim, int n, Rng& rng) {
  if (dim < 1 || n < 1) throw ConfigError("embedding needs dim, n >= 1");
  MatrixXd points(dim, n);
  const VectorXd origin = VectorXd::Zero(dim);
  for (int i = 0; i < n; ++i) points.col(i) = sample_uniform_ball(origin, 1.0, rng);
  const double largest = points.colwise().norm().maxCoeff();
  if (largest > 0.0) points /= largest;
  return points;
}

namespace {

// Mixes each row with the uniform kernel and renormalizes.
MatrixXd mix_rows(MatrixXd kernel, double mixing) {
  const double n = static_cast<double>(kernel.cols());
  kernel = (1.0 - mixing) * kernel.array() + mixing / n;
  for (Eigen::Index r = 0; r < kernel.rows(); ++r) {
    kernel.row(r) /= kernel.row(r).sum();
  }
  return kernel;
}

}  // namespace

FiniteEmbeddedMDP generate_mdp(const GeneratorParams& params) {
  if (params.n_states < 1 || params.n_actions < 1 || params.dim < 1) {
    throw ConfigError("generator sizes must be positive");
  }
  if (!(params.mixing >= 0.0 && params.mixing <= 1.0)) {
    throw ConfigError("mixing weight must lie in [0, 1]");
  }
  Rng rng(params.seed);
  std::exponential_distribution<double> expo(1.0);
  const int pairs = params.n_states * params.n_actions;
  MatrixXd kernel(pairs, params.n_states);
  for (int p = 0; p < pairs; ++p) {
    for (int t = 0; t < params.n_states; ++t) kernel(p, t) = expo(rng);
    kernel.row(p) /= kernel.row(p).sum();
  }
  VectorXd initial(params.n_states);
  for (int t = 0; t < params.n_states; ++t) initial[t] = expo(rng);
  initial /= initial.sum();
  MatrixXd embedding = random_embedding(params.dim, pairs, rng);
  return FiniteEmbeddedMDP(params.n_states, params.n_actions,
                           mix_rows(std::move(kernel), params.mixing),
                           std::move(initial), std::move(embedding),
                           params.gamma);
}

MatrixXd hidden_reward(int n_states, int n_actions, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  MatrixXd r(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) r(s, a) = unif(rng);
  }
  return r;
}

TabularPolicy make_expert(const FiniteEmbeddedMDP& mdp,
                          const MatrixXd& hidden_reward, double temperature,
                          double tolerance) {
  if (!(temperature > 0.0)) throw ConfigError("expert temperature must be > 0");
  const MatrixXd q = optimal_q(mdp, hidden_reward, tolerance);
  MatrixXd probs(mdp.n_states(), mdp.n_actions());
  for (int s = 0; s < mdp.n_states(); ++s) {
    probs.row(s) = softmax(q.row(s).transpose(), 1.0 / temperature).transpose();
  }
  return TabularPolicy(std::move(probs));
}

namespace {

constexpr double kBundledMixing = 0.05;

BundledEnvironment make_single_state() {
  Rng rng(101);
  MatrixXd transition = MatrixXd::Ones(2, 1);
  FiniteEmbeddedMDP mdp(1, 2, std::move(transition), VectorXd::Ones(1),
                        random_embedding(2, 2, rng), 0.9);
  return {"single_state", std::move(mdp), hidden_reward(1, 2, 102)};
}

BundledEnvironment make_chain4() {
  constexpr int kStates = 4;
  Rng rng(201);
  MatrixXd transition = MatrixXd::Zero(kStates * 2, kStates);
  for (int s = 0; s < kStates; ++s) {
    transition(s * 2 + 0, std::max(s - 1, 0)) = 1.0;
    transition(s * 2 + 1, std::min(s + 1, kStates - 1)) = 1.0;
  }
  FiniteEmbeddedMDP mdp(kStates, 2, mix_rows(std::move(transition), kBundledMixing),
                        VectorXd::Constant(kStates, 1.0 / kStates),
                        random_embedding(4, kStates * 2, rng), 0.9);
  return {"chain4", std::move(mdp), hidden_reward(kStates, 2, 202)};
}

BundledEnvironment make_grid3x3() {
  constexpr int kSide = 3;
  constexpr int kStates = kSide * kSide;
  constexpr int kActions = 4;
  const int dr[kActions] = {-1, 1, 0, 0};
  const int dc[kActions] = {0, 0, -1, 1};
  Rng rng(301);
  MatrixXd transition = MatrixXd::Zero(kStates * kActions, kStates);
  for (int row = 0; row < kSide; ++row) {
    for (int col = 0; col < kSide; ++col) {
      const int s = row * kSide + col;
      for (int a = 0; a < kActions; ++a) {
        const int nr = std::clamp(row + dr[a], 0, kSide - 1);
        const int nc = std::clamp(col + dc[a], 0, kSide - 1);
        transition(s * kActions + a, nr * kSide + nc) = 1.0;
      }
    }
  }
  FiniteEmbeddedMDP mdp(kStates, kActions,
                        mix_rows(std::move(transition), kBundledMixing),
                        VectorXd::Constant(kStates, 1.0 / kStates),
                        random_embedding(6, kStates * kActions, rng), 0.9);
  return {"grid3x3", std::move(mdp), hidden_reward(kStates, kActions, 302)};
}

}  // namespace

BundledEnvironment bundled_environment(const std::string& name) {
  if (name == "single_state") return make_single_state();
  if (name == "chain4") return make_chain4();
  if (name == "grid3x3") return make_grid3x3();
  throw ConfigError("unknown bundled environment '" + name + "'");
}

std::vector<std::string> bundled_names() {
  return {"single_state", "chain4", "grid3x3"};
}

std::vector<VectorXd> embedded_points(const FiniteEmbeddedMDP& mdp) {
  std::vector<VectorXd> out;
  out.reserve(static_cast<std::size_t>(mdp.n_pairs()));
  for (int p = 0; p < mdp.n_pairs(); ++p) out.push_back(mdp.embedding().col(p));
  return out;
}

}  // namespace gail
