#include "gail/network.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

namespace gail {

namespace {

constexpr int kCheckpointVersion = 1;

}  // namespace

InitScheme parse_init_scheme(const std::string& name) {
  if (name == "standard") return InitScheme::kStandard;
  if (name == "symmetric") return InitScheme::kSymmetric;
  throw ConfigError("unknown init scheme '" + name + "'");
}

std::string to_string(InitScheme scheme) {
  return scheme == InitScheme::kStandard ? "standard" : "symmetric";
}

BallConstraint::BallConstraint(VectorXd anchor_in, double radius_in)
    : anchor(std::move(anchor_in)), radius(radius_in) {
  if (!(radius >= 0.0)) throw ConfigError("ball radius must be nonnegative");
}

bool BallConstraint::contains(const VectorXd& w, double slack) const {
  return distance(w, anchor) <= radius * (1.0 + slack) + slack;
}

VectorXd project_ball(const VectorXd& w, const BallConstraint& ball) {
  if (w.size() != ball.anchor.size()) {
    throw std::invalid_argument("project_ball: dimension mismatch");
  }
  const VectorXd offset = w - ball.anchor;
  const double norm = offset.norm();
  // a rescaled point lands within a few ulps of the sphere; treating those
  // as inside keeps the projection idempotent
  if (norm <= ball.radius * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) return w;
  return ball.anchor + (ball.radius / norm) * offset;
}

TwoLayerNet::TwoLayerNet(VectorXd signs, VectorXd anchor, int input_dim)
    : signs_(std::move(signs)),
      anchor_(std::move(anchor)),
      weights_(anchor_),
      input_dim_(input_dim) {
  if (signs_.size() < 1 || input_dim_ < 1) {
    throw ConfigError("network width and input dimension must be positive");
  }
  if (anchor_.size() != signs_.size() * input_dim_) {
    throw ConfigError("anchor length must equal width * input_dim");
  }
  for (Eigen::Index l = 0; l < signs_.size(); ++l) {
    if (signs_[l] != 1.0 && signs_[l] != -1.0) {
      throw ConfigError("output signs must be +1 or -1");
    }
  }
}

TwoLayerNet TwoLayerNet::init(int width, int input_dim, InitScheme scheme,
                              Rng& rng) {
  if (width < 1 || input_dim < 1) {
    throw ConfigError("network width and input dimension must be positive");
  }
  if (scheme == InitScheme::kSymmetric && width % 2 != 0) {
    throw ConfigError("symmetric initialization needs an even width");
  }
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> normal(0.0,
                                          1.0 / std::sqrt(double(input_dim)));
  VectorXd signs(width);
  VectorXd anchor(static_cast<Eigen::Index>(width) * input_dim);
  const int drawn = scheme == InitScheme::kSymmetric ? width / 2 : width;
  for (int l = 0; l < drawn; ++l) {
    signs[l] = coin(rng) ? 1.0 : -1.0;
    for (int i = 0; i < input_dim; ++i) anchor[l * input_dim + i] = normal(rng);
  }
  for (int l = drawn; l < width; ++l) {
    const int mirror = l - drawn;
    signs[l] = -signs[mirror];
    anchor.segment(l * input_dim, input_dim) =
        anchor.segment(mirror * input_dim, input_dim);
  }
  return TwoLayerNet(std::move(signs), std::move(anchor), input_dim);
}

void TwoLayerNet::set_weights(VectorXd w) {
  if (w.size() != anchor_.size()) {
    throw std::invalid_argument("weight vector has the wrong length");
  }
  weights_ = std::move(w);
}

TwoLayerNet TwoLayerNet::with_weights(VectorXd w) const {
  TwoLayerNet out = *this;
  out.set_weights(std::move(w));
  return out;
}

void TwoLayerNet::check_input(const Eigen::Ref<const VectorXd>& x) const {
  if (x.size() != input_dim_) {
    throw std::invalid_argument("input dimension mismatch");
  }
  if (x.squaredNorm() > 1.0 + 1e-9) {
    static thread_local bool warned = false;
    if (!warned) {
      std::cerr << "warning: network input norm " << x.norm()
                << " exceeds 1\n";
      warned = true;
    }
  }
}

double TwoLayerNet::block_dot(const VectorXd& w, int l,
                              const Eigen::Ref<const VectorXd>& x) const {
  const double* block = w.data() + static_cast<Eigen::Index>(l) * input_dim_;
  double sum = 0.0;
  for (int i = 0; i < input_dim_; ++i) sum += block[i] * x[i];
  return sum;
}

double TwoLayerNet::forward(const Eigen::Ref<const VectorXd>& x) const {
  return linearized_forward(weights_, weights_, x);
}

VectorXd TwoLayerNet::features(const Eigen::Ref<const VectorXd>& x) const {
  return features_at(weights_, x);
}

double TwoLayerNet::linearized_forward(const VectorXd& weights,
                                       const VectorXd& gates,
                                       const Eigen::Ref<const VectorXd>& x) const {
  check_input(x);
  if (weights.size() != anchor_.size() || gates.size() != anchor_.size()) {
    throw std::invalid_argument("parameter vector has the wrong length");
  }
  // Accumulated per (half, sign) so that a mirrored symmetric init cancels
  // to exactly zero regardless of rounding.
  const int m = width();
  double acc[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (int l = 0; l < m; ++l) {
    const double gate = block_dot(gates, l, x);
    if (gate > 0.0) {
      const double pre = &weights == &gates ? gate : block_dot(weights, l, x);
      acc[l < m / 2 ? 0 : 1][signs_[l] > 0.0 ? 0 : 1] += pre;
    }
  }
  const double positive = acc[0][0] + acc[1][0];
  const double negative = acc[0][1] + acc[1][1];
  return (positive - negative) / std::sqrt(static_cast<double>(m));
}

VectorXd TwoLayerNet::features_at(const VectorXd& gates,
                                  const Eigen::Ref<const VectorXd>& x) const {
  check_input(x);
  if (gates.size() != anchor_.size()) {
    throw std::invalid_argument("parameter vector has the wrong length");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(width()));
  VectorXd out = VectorXd::Zero(anchor_.size());
  for (int l = 0; l < width(); ++l) {
    if (block_dot(gates, l, x) > 0.0) {
      out.segment(l * input_dim_, input_dim_) = (scale * signs_[l]) * x;
    }
  }
  return out;
}

double TwoLayerNet::min_gate_margin(const Eigen::Ref<const VectorXd>& x) const {
  check_input(x);
  double margin = std::numeric_limits<double>::infinity();
  for (int l = 0; l < width(); ++l) {
    margin = std::min(margin, std::abs(block_dot(weights_, l, x)));
  }
  return margin;
}

double linearization_probe(const TwoLayerNet& net, double radius,
                           std::span<const VectorXd> inputs, int n_inputs,
                           Rng& rng) {
  if (!(radius >= 0.0)) throw ConfigError("probe radius must be nonnegative");
  if (inputs.empty() || n_inputs < 1) {
    throw std::invalid_argument("linearization_probe needs inputs");
  }
  const VectorXd w = sample_uniform_ball(net.anchor(), radius, rng);
  const VectorXd w1 = sample_uniform_ball(net.anchor(), radius, rng);
  const VectorXd w2 = sample_uniform_ball(net.anchor(), radius, rng);
  std::uniform_int_distribution<std::size_t> pick(0, inputs.size() - 1);
  double total = 0.0;
  for (int i = 0; i < n_inputs; ++i) {
    const VectorXd& x = inputs[pick(rng)];
    total += std::abs(net.linearized_forward(w, w1, x) -
                      net.linearized_forward(w, w2, x));
  }
  return total / n_inputs;
}

std::vector<double> to_std(const VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

VectorXd from_std(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json net_to_json(const TwoLayerNet& net) {
  return {
      {"format", "two-layer-relu"},
      {"version", kCheckpointVersion},
      {"m", net.width()},
      {"d", net.input_dim()},
      {"b", to_std(net.signs())},
      {"W0", to_std(net.anchor())},
      {"W", to_std(net.weights())},
  };
}

TwoLayerNet net_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "two-layer-relu") {
      throw ConfigError("not a two-layer-relu checkpoint");
    }
    if (doc.at("version").get<int>() != kCheckpointVersion) {
      throw ConfigError("unsupported checkpoint version");
    }
    const int m = doc.at("m").get<int>();
    const int d = doc.at("d").get<int>();
    VectorXd signs = from_std(doc.at("b").get<std::vector<double>>());
    VectorXd anchor = from_std(doc.at("W0").get<std::vector<double>>());
    VectorXd weights = from_std(doc.at("W").get<std::vector<double>>());
    if (signs.size() != m) throw ConfigError("checkpoint width mismatch");
    TwoLayerNet net(std::move(signs), std::move(anchor), d);
    net.set_weights(std::move(weights));
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_net(const TwoLayerNet& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << net_to_json(net).dump() << '\n';
}

TwoLayerNet load_net(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse checkpoint " + path.string() + ": " +
                      e.what());
  }
  return net_from_json(doc);
}

}  // namespace gail
