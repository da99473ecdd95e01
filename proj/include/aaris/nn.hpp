// SPDX-License-Identifier: Apache-2.0
//
// Minimal neural substrate for the agents: dense MLPs with tanh hidden
// layers and a linear output, exact reverse-mode gradients, Adam/SGD
// updates, tanh-squashed Gaussian sampling and soft target updates.
// Batches are column-major: an input matrix is (input_dim x batch).

#ifndef AARIS_NN_HPP
#define AARIS_NN_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "aaris/common.hpp"

namespace aaris {

struct Mlp {
  std::vector<int> dims;                 // layer widths, input first
  std::vector<Eigen::MatrixXd> weights;  // weights[l]: dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;   // biases[l]: dims[l+1]

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  static Mlp create(const std::vector<int>& layer_dims, RngStream& rng);

  int input_dim() const { return dims.front(); }
  int output_dim() const { return dims.back(); }
  int num_layers() const { return static_cast<int>(weights.size()); }
  /// sum_l (dims[l]*dims[l+1] + dims[l+1]); weight products plus biases.
  long param_count() const;
};

Eigen::MatrixXd forward(const Mlp& net, const Eigen::MatrixXd& input);
Eigen::VectorXd forward(const Mlp& net, const Eigen::VectorXd& input);

/// Activations recorded during a forward pass, for backward().
struct MlpTrace {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> post;  // post[l]: activation after layer l

  const Eigen::MatrixXd& output() const { return post.back(); }
};

MlpTrace forward_trace(const Mlp& net, const Eigen::MatrixXd& input);

struct MlpGrads {
  std::vector<Eigen::MatrixXd> d_weights;
  std::vector<Eigen::VectorXd> d_biases;
  Eigen::MatrixXd d_input;

  static MlpGrads zeros_like(const Mlp& net);
  void accumulate(const MlpGrads& other);
  void scale(double factor);
  double max_abs() const;
};

/// Exact reverse-mode gradients of the recorded computation. d_output is
/// dLoss/dOutput, one column per batch sample; contributions are summed
/// over the batch (put any 1/B factor into d_output).
MlpGrads backward(const Mlp& net, const MlpTrace& trace, const Eigen::MatrixXd& d_output);

enum class OptimizerKind { adam, sgd };

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::adam;
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;

  static OptimizerState create(const Mlp& net, double lr, OptimizerKind kind);
};

/// In-place parameter update; Adam with bias correction, or plain SGD.
void apply_update(Mlp& net, OptimizerState& opt, const MlpGrads& grads);

/// target <- tau * online + (1 - tau) * target. tau must be in (0, 1].
void soft_update(Mlp& target, const Mlp& online, double tau);

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

/// Mean / log-std pair; log-std entries clamped to [kLogStdMin, kLogStdMax].
struct GaussianHead {
  Eigen::VectorXd mean;
  Eigen::VectorXd log_std;
};

/// Interpret the first half of a 2A-dim network output as the mean and the
/// second half as the (clamped) log-std.
GaussianHead split_gaussian_head(const Eigen::VectorXd& net_output);

struct ReparameterizedSample {
  Eigen::VectorXd action;      // tanh(mean + noise .* std)
  Eigen::VectorXd pre_squash;  // mean + noise .* std
  Eigen::VectorXd noise;       // the standard-normal draw
  double log_prob = 0.0;       // Gaussian log-density with tanh correction
};

ReparameterizedSample sample_reparameterized(const GaussianHead& head, RngStream& rng);

/// log N(z; mu, sigma) - log(1 - tanh(z)^2 + 1e-6), summed over coordinates.
double tanh_gaussian_log_prob(const GaussianHead& head, const Eigen::VectorXd& pre_squash);

// --- checkpoint serialization ----------------------------------------------
// Binary format, little-endian: magic "AARISNN1", u32 version, u32 layer
// count, u32 dims, then per layer the row-major f64 weight matrix followed
// by the f64 bias vector.

void save_mlp(std::ostream& out, const Mlp& net);
Mlp load_mlp(std::istream& in);

/// Multi-network checkpoint keyed by name; magic "AARISCK1".
void save_checkpoint(const std::string& path, const std::map<std::string, Mlp>& nets);
std::map<std::string, Mlp> load_checkpoint(const std::string& path);

}  // namespace aaris

#endif  // AARIS_NN_HPP
