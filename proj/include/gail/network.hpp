#pragma once

#include <filesystem>
#include <span>

#include <json.hpp>

#include "gail/common.hpp"

namespace gail {

enum class InitScheme { kStandard, kSymmetric };

InitScheme parse_init_scheme(const std::string& name);
std::string to_string(InitScheme scheme);

/// Euclidean ball S_B = {W : ‖W - anchor‖ <= radius}.
struct BallConstraint {
  BallConstraint(VectorXd anchor, double radius);

  bool contains(const VectorXd& w, double slack = 1e-9) const;

  VectorXd anchor;
  double radius;
};

/// Radial projection onto the ball; points already inside are returned as is.
VectorXd project_ball(const VectorXd& w, const BallConstraint& ball);

/// Width-m two-layer ReLU network with frozen output signs b and a frozen
/// anchor W_0. Weights are stored as m consecutive blocks of length d.
///
///   u_W(x) = m^{-1/2} Σ_l b_l 1{x·W_l > 0} x·W_l = <W, φ_W(x)>
///
/// The gate is a strict inequality, so exact ties are inactive.
class TwoLayerNet {
 public:
  /// Builds a net at its anchor (W = W_0). Signs must be ±1.
  TwoLayerNet(VectorXd signs, VectorXd anchor, int input_dim);

  /// b_l ~ Unif{±1}, [W_0]_l ~ N(0, I/d). The symmetric scheme draws the
  /// first m/2 neurons and mirrors them with flipped signs, so u_{W_0} ≡ 0.
  static TwoLayerNet init(int width, int input_dim, InitScheme scheme, Rng& rng);

  int width() const { return static_cast<int>(signs_.size()); }
  int input_dim() const { return input_dim_; }
  Eigen::Index num_params() const { return anchor_.size(); }

  const VectorXd& signs() const { return signs_; }
  const VectorXd& anchor() const { return anchor_; }
  const VectorXd& weights() const { return weights_; }

  void set_weights(VectorXd w);
  TwoLayerNet with_weights(VectorXd w) const;

  double forward(const Eigen::Ref<const VectorXd>& x) const;
  VectorXd features(const Eigen::Ref<const VectorXd>& x) const;

  /// <weights, φ_{gates}(x)>: the output with the gate pattern taken from a
  /// different parameter vector.
  double linearized_forward(const VectorXd& weights, const VectorXd& gates,
                            const Eigen::Ref<const VectorXd>& x) const;

  /// φ_{gates}(x) for an arbitrary parameter vector with this net's signs.
  VectorXd features_at(const VectorXd& gates,
                       const Eigen::Ref<const VectorXd>& x) const;

  /// Smallest |x·W_l| over all neurons; distance to the nearest gate flip.
  double min_gate_margin(const Eigen::Ref<const VectorXd>& x) const;

 private:
  void check_input(const Eigen::Ref<const VectorXd>& x) const;
  // x·w_l with a fixed summation order, so identical blocks give identical
  // pre-activations.
  double block_dot(const VectorXd& w, int l,
                   const Eigen::Ref<const VectorXd>& x) const;

  VectorXd signs_;
  VectorXd anchor_;
  VectorXd weights_;
  int input_dim_;
};

/// Mean |<W, φ_{W1}(x)> - <W, φ_{W2}(x)>| with W, W1, W2 uniform in the
/// radius-B ball around the anchor and x uniform over `inputs`.
double linearization_probe(const TwoLayerNet& net, double radius,
                           std::span<const VectorXd> inputs, int n_inputs,
                           Rng& rng);

/// Versioned checkpoint document holding (m, d, b, W_0, W).
nlohmann::json net_to_json(const TwoLayerNet& net);
TwoLayerNet net_from_json(const nlohmann::json& doc);
void save_net(const TwoLayerNet& net, const std::filesystem::path& path);
TwoLayerNet load_net(const std::filesystem::path& path);

std::vector<double> to_std(const VectorXd& v);
VectorXd from_std(const std::vector<double>& v);

}  // namespace gail
