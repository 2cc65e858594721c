#include <doctest.h>

#include <filesystem>

#include "gail/mdp.hpp"
#include "gail/tabular.hpp"
#include "support.hpp"

using namespace gail;
using namespace testing_support;

namespace {

FiniteEmbeddedMDP cycle_mdp(int n) {
  MatrixXd p = MatrixXd::Zero(n * 2, n);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < 2; ++a) p(s * 2 + a, (s + 1) % n) = 1.0;
  }
  MatrixXd emb = MatrixXd::Constant(2, n * 2, 0.5);
  return FiniteEmbeddedMDP(n, 2, p, VectorXd::Constant(n, 1.0 / n), emb, 0.9);
}

FiniteEmbeddedMDP two_state(double gamma) {
  MatrixXd p(4, 2);
  p << 0.3, 0.7,  //
      0.5, 0.5,   //
      0.5, 0.5,   //
      0.5, 0.5;
  MatrixXd emb(2, 4);
  emb << 1, 0, 0.6, 0,  //
      0, 1, 0.8, -1;
  VectorXd rho(2);
  rho << 0.5, 0.5;
  return FiniteEmbeddedMDP(2, 2, p, rho, emb, gamma);
}

FiniteEmbeddedMDP single_state(int n_actions, double gamma) {
  return FiniteEmbeddedMDP(1, n_actions, MatrixXd::Ones(n_actions, 1),
                           VectorXd::Ones(1),
                           MatrixXd::Constant(2, n_actions, 0.5), gamma);
}

}  // namespace

TEST_CASE("construction rejects broken invariants") {
  const MatrixXd emb = MatrixXd::Constant(2, 2, 0.5);
  CHECK_THROWS_AS(FiniteEmbeddedMDP(1, 2, MatrixXd::Constant(2, 1, 0.9),
                                    VectorXd::Ones(1), emb, 0.9),
                  ConfigError);
  MatrixXd negative(2, 2);
  negative << 1.5, -0.5, 0.5, 0.5;
  CHECK_THROWS_AS(FiniteEmbeddedMDP(2, 1, negative, VectorXd::Constant(2, 0.5),
                                    emb, 0.9),
                  ConfigError);
  CHECK_THROWS_AS(FiniteEmbeddedMDP(1, 2, MatrixXd::Ones(2, 1),
                                    VectorXd::Constant(1, 0.9), emb, 0.9),
                  ConfigError);
  CHECK_THROWS_AS(FiniteEmbeddedMDP(1, 2, MatrixXd::Ones(2, 1), VectorXd::Ones(1),
                                    MatrixXd::Constant(2, 2, 0.8), 0.9),
                  ConfigError);
  CHECK_THROWS_AS(FiniteEmbeddedMDP(1, 2, MatrixXd::Ones(2, 1), VectorXd::Ones(1),
                                    emb, 1.0),
                  ConfigError);
  CHECK_THROWS_AS(FiniteEmbeddedMDP(1, 2, MatrixXd::Ones(2, 1), VectorXd::Ones(1),
                                    emb, 0.0),
                  ConfigError);
  // rounding-level slack is tolerated
  MatrixXd almost = MatrixXd::Ones(2, 1);
  almost(0, 0) += 1e-14;
  CHECK_NOTHROW(FiniteEmbeddedMDP(1, 2, almost, VectorXd::Ones(1), emb, 0.9));
}

TEST_CASE("policy tables validate rows") {
  MatrixXd bad(1, 2);
  bad << 0.6, 0.6;
  CHECK_THROWS_AS(TabularPolicy{bad}, ConfigError);
  bad << 1.2, -0.2;
  CHECK_THROWS_AS(TabularPolicy{bad}, ConfigError);
  const TabularPolicy u = TabularPolicy::uniform(3, 4);
  CHECK(u.probs().isApproxToConstant(0.25));
}

TEST_CASE("step follows the transition row") {
  Rng rng(1);
  const FiniteEmbeddedMDP cyc = cycle_mdp(3);
  CHECK(step(cyc, 0, 1, rng) == 1);
  CHECK(step(cyc, 2, 0, rng) == 0);

  const FiniteEmbeddedMDP absorbing = single_state(2, 0.9);
  CHECK(step(absorbing, 0, 1, rng) == 0);

  const FiniteEmbeddedMDP two = two_state(0.9);
  int ones = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ones += step(two, 0, 0, rng);
  CHECK(std::abs(ones / double(n) - 0.7) <= 0.01);

  CHECK_THROWS_AS(step(two, 2, 0, rng), std::out_of_range);
  CHECK_THROWS_AS(step(two, 0, -1, rng), std::out_of_range);
}

TEST_CASE("visitation sampling matches the discounted series") {
  Rng rng(2);
  const FiniteEmbeddedMDP one = single_state(3, 0.9);
  const TabularPolicy u1 = TabularPolicy::uniform(1, 3);
  for (int i = 0; i < 1000; ++i) CHECK(sample_visitation(one, u1, rng).state == 0);

  // near-zero discount: draws follow ρ(s) π(a|s)
  const FiniteEmbeddedMDP myopic = two_state(1e-9);
  const TabularPolicy pi = random_policy(2, 2, rng);
  const MatrixXd h0 = histogram(2, 2, 100000, [&] {
    return sample_visitation(myopic, pi, rng);
  });
  MatrixXd expected0 = pi.probs();
  expected0.array().colwise() *= myopic.initial().array();
  CHECK(tv(h0, expected0) <= 0.02);

  const FiniteEmbeddedMDP mdp = random_mdp(3, 2, 3, 0.9, 17);
  const TabularPolicy pi3 = random_policy(3, 2, rng);
  const VectorXd d = visitation_by_series(mdp, pi3, 2000);
  MatrixXd nu = pi3.probs();
  nu.array().colwise() *= d.array();
  const MatrixXd h = histogram(3, 2, 200000, [&] { return sample_visitation(mdp, pi3, rng); });
  CHECK(tv(h, nu) <= 0.02);
}

TEST_CASE("stationary sampling matches the long-run chain") {
  Rng rng(3);
  const FiniteEmbeddedMDP one = single_state(2, 0.9);
  const TabularPolicy u1 = TabularPolicy::uniform(1, 2);
  CHECK(sample_stationary(one, u1, rng, 10).state == 0);

  MatrixXd p(4, 2);
  p << 0.2, 0.8, 0.6, 0.4, 0.8, 0.2, 0.4, 0.6;  // doubly stochastic under uniform
  const FiniteEmbeddedMDP ds(2, 2, p, (VectorXd(2) << 1.0, 0.0).finished(),
                             MatrixXd::Constant(2, 4, 0.5), 0.9);
  const TabularPolicy u = TabularPolicy::uniform(2, 2);
  const MatrixXd h = histogram(2, 2, 100000, [&] { return sample_stationary(ds, u, rng, 100); });
  CHECK(std::abs(h.row(0).sum() - 0.5) <= 0.02);

  // oracle: power iteration on the state kernel
  const FiniteEmbeddedMDP mdp = random_mdp(4, 3, 3, 0.9, 23);
  const TabularPolicy pi = random_policy(4, 3, rng);
  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Constant(4, 0.25);
  MatrixXd kernel = MatrixXd::Zero(4, 4);
  for (int s = 0; s < 4; ++s) {
    for (int a = 0; a < 3; ++a) kernel.row(s) += pi(s, a) * mdp.next_state_probs(s, a);
  }
  for (int i = 0; i < 10000; ++i) mu = mu * kernel;
  MatrixXd expected = pi.probs();
  expected.array().colwise() *= mu.transpose().array();
  const MatrixXd hs = histogram(4, 3, 100000, [&] { return sample_stationary(mdp, pi, rng, 100); });
  CHECK(tv(hs, expected) <= 0.03);
}

TEST_CASE("continuing chain hands out consecutive tuples") {
  Rng rng(4);
  const FiniteEmbeddedMDP mdp = random_mdp(4, 2, 3, 0.9, 5);
  const TabularPolicy pi = random_policy(4, 2, rng);
  StationaryChain chain(mdp, pi, 10, rng);
  Transition prev = chain.next(rng);
  for (int i = 0; i < 100; ++i) {
    const Transition t = chain.next(rng);
    CHECK(t.state == prev.next_state);
    CHECK(t.action == prev.next_action);
    prev = t;
  }
}

TEST_CASE("expert data are visitation draws") {
  Rng rng(5);
  const FiniteEmbeddedMDP mdp = random_mdp(3, 2, 3, 0.8, 9);
  const TabularPolicy pi = random_policy(3, 2, rng);
  CHECK(generate_expert_trajectory(mdp, pi, 0, rng).empty());

  const FiniteEmbeddedMDP one = single_state(3, 0.9);
  MatrixXd det = MatrixXd::Zero(1, 3);
  det(0, 2) = 1.0;
  for (const StateAction& sa : generate_expert_trajectory(one, TabularPolicy(det), 200, rng)) {
    CHECK(sa == StateAction{0, 2});
  }

  const auto data = generate_expert_trajectory(mdp, pi, 100000, rng);
  std::size_t i = 0;
  const MatrixXd h = histogram(3, 2, 100000, [&] { return data[i++]; });
  CHECK(tv(h, exact_visitation(mdp, pi).pair) <= 0.02);
}

TEST_CASE("identical seeds give identical samples") {
  const FiniteEmbeddedMDP mdp = random_mdp(4, 3, 3, 0.9, 31);
  Rng policy_rng(0);
  const TabularPolicy pi = random_policy(4, 3, policy_rng);
  Rng a(99);
  Rng b(99);
  for (int i = 0; i < 500; ++i) {
    CHECK(sample_visitation(mdp, pi, a) == sample_visitation(mdp, pi, b));
  }
}

TEST_CASE("json round trip preserves the MDP") {
  const FiniteEmbeddedMDP mdp = random_mdp(3, 2, 4, 0.85, 3);
  const FiniteEmbeddedMDP back = mdp_from_json(mdp_to_json(mdp));
  CHECK(back.transition() == mdp.transition());
  CHECK(back.embedding() == mdp.embedding());
  CHECK(back.initial() == mdp.initial());
  CHECK(back.gamma() == mdp.gamma());

  const auto path = std::filesystem::temp_directory_path() / "gail_test_mdp.json";
  save_mdp(mdp, path);
  CHECK(load_mdp(path).transition() == mdp.transition());
  std::filesystem::remove(path);

  nlohmann::json doc = mdp_to_json(mdp);
  doc["P"][0][0][0] = 5.0;
  CHECK_THROWS_AS(mdp_from_json(doc), ConfigError);
  doc = mdp_to_json(mdp);
  doc.erase("rho");
  CHECK_THROWS_AS(mdp_from_json(doc), ConfigError);
}
