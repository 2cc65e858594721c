#include "gail/mdp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gail {

namespace {

constexpr double kSumTolerance = 1e-12;
constexpr double kNormSlack = 1e-12;

void check_distribution(const Eigen::Ref<const VectorXd>& p,
                        const std::string& what) {
  if (!p.allFinite() || p.minCoeff() < 0.0) {
    throw ConfigError(what + " has negative or non-finite entries");
  }
  if (std::abs(p.sum() - 1.0) > kSumTolerance) {
    std::ostringstream msg;
    msg << what << " sums to " << p.sum() << ", not 1";
    throw ConfigError(msg.str());
  }
}

}  // namespace

FiniteEmbeddedMDP::FiniteEmbeddedMDP(int n_states, int n_actions,
                                     MatrixXd transition, VectorXd initial,
                                     MatrixXd embedding, double gamma)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      initial_(std::move(initial)),
      embedding_(std::move(embedding)),
      gamma_(gamma) {
  if (n_states_ <= 0 || n_actions_ <= 0) {
    throw ConfigError("MDP needs at least one state and one action");
  }
  if (!(gamma_ > 0.0 && gamma_ < 1.0)) {
    throw ConfigError("discount must lie in (0, 1)");
  }
  const int pairs = n_states_ * n_actions_;
  if (transition_.rows() != pairs || transition_.cols() != n_states_) {
    throw ConfigError("transition table has the wrong shape");
  }
  if (initial_.size() != n_states_) {
    throw ConfigError("initial distribution has the wrong length");
  }
  if (embedding_.cols() != pairs || embedding_.rows() < 1) {
    throw ConfigError("embedding table has the wrong shape");
  }
  for (int p = 0; p < pairs; ++p) {
    check_distribution(transition_.row(p).transpose(),
                       "transition row " + std::to_string(p));
    const double norm = embedding_.col(p).norm();
    if (!std::isfinite(norm) || norm > 1.0 + kNormSlack) {
      throw ConfigError("embedding of pair " + std::to_string(p) +
                        " lies outside the unit ball");
    }
  }
  check_distribution(initial_, "initial distribution");
}

int FiniteEmbeddedMDP::pair_index(int s, int a) const {
  check_state(s);
  check_action(a);
  return s * n_actions_ + a;
}

void FiniteEmbeddedMDP::check_state(int s) const {
  if (s < 0 || s >= n_states_) {
    throw std::out_of_range("state index " + std::to_string(s) +
                            " out of range");
  }
}

void FiniteEmbeddedMDP::check_action(int a) const {
  if (a < 0 || a >= n_actions_) {
    throw std::out_of_range("action index " + std::to_string(a) +
                            " out of range");
  }
}

TabularPolicy::TabularPolicy(MatrixXd probs) : probs_(std::move(probs)) {
  if (probs_.rows() < 1 || probs_.cols() < 1) {
    throw ConfigError("policy table is empty");
  }
  for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
    check_distribution(probs_.row(s).transpose(),
                       "policy row " + std::to_string(s));
  }
}

TabularPolicy TabularPolicy::uniform(int n_states, int n_actions) {
  return TabularPolicy(MatrixXd::Constant(n_states, n_actions,
                                          1.0 / static_cast<double>(n_actions)));
}

int TabularPolicy::sample_action(int s, Rng& rng) const {
  return sample_categorical(probs_.row(s), rng);
}

int step(const FiniteEmbeddedMDP& mdp, int s, int a, Rng& rng) {
  return sample_categorical(mdp.next_state_probs(s, a), rng);
}

namespace {

void check_policy_shape(const FiniteEmbeddedMDP& mdp, const TabularPolicy& pi) {
  if (pi.n_states() != mdp.n_states() || pi.n_actions() != mdp.n_actions()) {
    throw std::invalid_argument("policy shape does not match the MDP");
  }
}

}  // namespace

StateAction sample_visitation(const FiniteEmbeddedMDP& mdp,
                              const TabularPolicy& pi, Rng& rng) {
  check_policy_shape(mdp, pi);
  // failures before the first success: P(H = h) = (1-γ) γ^h
  std::geometric_distribution<long> horizon_dist(1.0 - mdp.gamma());
  const long horizon = horizon_dist(rng);
  int s = sample_categorical(mdp.initial(), rng);
  for (long t = 0; t < horizon; ++t) {
    const int a = pi.sample_action(s, rng);
    s = step(mdp, s, a, rng);
  }
  return {s, pi.sample_action(s, rng)};
}

StateAction sample_stationary(const FiniteEmbeddedMDP& mdp,
                              const TabularPolicy& pi, Rng& rng, int burn_in) {
  check_policy_shape(mdp, pi);
  if (burn_in < 0) throw ConfigError("burn_in must be nonnegative");
  int s = sample_categorical(mdp.initial(), rng);
  for (int t = 0; t < burn_in; ++t) {
    s = step(mdp, s, pi.sample_action(s, rng), rng);
  }
  return {s, pi.sample_action(s, rng)};
}

std::vector<StateAction> generate_expert_trajectory(
    const FiniteEmbeddedMDP& mdp, const TabularPolicy& expert, int count,
    Rng& rng) {
  if (count < 0) throw ConfigError("expert sample count must be nonnegative");
  std::vector<StateAction> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(sample_visitation(mdp, expert, rng));
  }
  return out;
}

StationaryChain::StationaryChain(const FiniteEmbeddedMDP& mdp,
                                 const TabularPolicy& pi, int burn_in, Rng& rng)
    : mdp_(&mdp), pi_(&pi), current_(sample_stationary(mdp, pi, rng, burn_in)) {}

Transition StationaryChain::next(Rng& rng) {
  Transition tr;
  tr.state = current_.state;
  tr.action = current_.action;
  tr.next_state = step(*mdp_, tr.state, tr.action, rng);
  tr.next_action = pi_->sample_action(tr.next_state, rng);
  current_ = {tr.next_state, tr.next_action};
  return tr;
}

nlohmann::json mdp_to_json(const FiniteEmbeddedMDP& mdp) {
  nlohmann::json doc;
  doc["n_states"] = mdp.n_states();
  doc["n_actions"] = mdp.n_actions();
  doc["d"] = mdp.dim();
  doc["gamma"] = mdp.gamma();
  doc["rho"] = std::vector<double>(mdp.initial().data(),
                                   mdp.initial().data() + mdp.n_states());
  auto p = nlohmann::json::array();
  auto emb = nlohmann::json::array();
  for (int s = 0; s < mdp.n_states(); ++s) {
    auto p_s = nlohmann::json::array();
    auto e_s = nlohmann::json::array();
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const VectorXd row = mdp.next_state_probs(s, a).transpose();
      p_s.push_back(std::vector<double>(row.data(), row.data() + row.size()));
      const VectorXd x = mdp.embed(s, a);
      e_s.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    }
    p.push_back(std::move(p_s));
    emb.push_back(std::move(e_s));
  }
  doc["P"] = std::move(p);
  doc["embedding"] = std::move(emb);
  return doc;
}

FiniteEmbeddedMDP mdp_from_json(const nlohmann::json& doc) {
  try {
    const int n_states = doc.at("n_states").get<int>();
    const int n_actions = doc.at("n_actions").get<int>();
    const int d = doc.at("d").get<int>();
    const double gamma = doc.at("gamma").get<double>();
    if (n_states <= 0 || n_actions <= 0 || d <= 0) {
      throw ConfigError("MDP dimensions must be positive");
    }
    const auto rho = doc.at("rho").get<std::vector<double>>();
    if (static_cast<int>(rho.size()) != n_states) {
      throw ConfigError("rho has the wrong length");
    }
    const auto& p = doc.at("P");
    const auto& emb = doc.at("embedding");
    if (static_cast<int>(p.size()) != n_states ||
        static_cast<int>(emb.size()) != n_states) {
      throw ConfigError("P or embedding has the wrong number of states");
    }
    MatrixXd transition(n_states * n_actions, n_states);
    MatrixXd embedding(d, n_states * n_actions);
    for (int s = 0; s < n_states; ++s) {
      if (static_cast<int>(p[s].size()) != n_actions ||
          static_cast<int>(emb[s].size()) != n_actions) {
        throw ConfigError("P or embedding has the wrong number of actions");
      }
      for (int a = 0; a < n_actions; ++a) {
        const auto row = p[s][a].get<std::vector<double>>();
        const auto x = emb[s][a].get<std::vector<double>>();
        if (static_cast<int>(row.size()) != n_states ||
            static_cast<int>(x.size()) != d) {
          throw ConfigError("P row or embedding vector has the wrong length");
        }
        const int idx = s * n_actions + a;
        for (int t = 0; t < n_states; ++t) transition(idx, t) = row[t];
        for (int i = 0; i < d; ++i) embedding(i, idx) = x[i];
      }
    }
    return FiniteEmbeddedMDP(n_states, n_actions, std::move(transition),
                             Eigen::Map<const VectorXd>(rho.data(), n_states),
                             std::move(embedding), gamma);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed MDP document: ") + e.what());
  }
}

FiniteEmbeddedMDP load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open MDP file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse MDP file " + path.string() + ": " +
                      e.what());
  }
  return mdp_from_json(doc);
}

void save_mdp(const FiniteEmbeddedMDP& mdp, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << mdp_to_json(mdp).dump(2) << '\n';
}

}  // namespace gail
