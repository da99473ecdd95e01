// SPDX-License-Identifier: Apache-2.0
#include "aaris/nn.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace aaris {

Mlp Mlp::create(const std::vector<int>& layer_dims, RngStream& rng) {
  if (layer_dims.size() < 2)
    throw std::invalid_argument("Mlp: need at least input and output dims");
  for (int d : layer_dims) {
    if (d < 1) throw std::invalid_argument("Mlp: layer dims must be >= 1");
  }
  Mlp net;
  net.dims = layer_dims;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i) {
      for (int j = 0; j < fan_in; ++j) {
        w(i, j) = rng.uniform(-bound, bound);
      }
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return net;
}

long Mlp::param_count() const {
  long n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += weights[l].size() + biases[l].size();
  }
  return n;
}

MlpTrace forward_trace(const Mlp& net, const Eigen::MatrixXd& input) {
  if (input.rows() != net.input_dim())
    throw std::invalid_argument("forward: input dimension mismatch");
  MlpTrace trace;
  trace.input = input;
  trace.post.reserve(net.weights.size());
  Eigen::MatrixXd x = input;
  for (int l = 0; l < net.num_layers(); ++l) {
    Eigen::MatrixXd z = (net.weights[static_cast<std::size_t>(l)] * x).colwise() +
                        net.biases[static_cast<std::size_t>(l)];
    // tanh on hidden layers, linear output
    if (l + 1 < net.num_layers()) z = z.array().tanh();
    trace.post.push_back(z);
    x = std::move(z);
  }
  return trace;
}

Eigen::MatrixXd forward(const Mlp& net, const Eigen::MatrixXd& input) {
  return forward_trace(net, input).post.back();
}

Eigen::VectorXd forward(const Mlp& net, const Eigen::VectorXd& input) {
  return forward(net, Eigen::MatrixXd(input)).col(0);
}

MlpGrads MlpGrads::zeros_like(const Mlp& net) {
  MlpGrads g;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    g.d_weights.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.d_biases.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  return g;
}

void MlpGrads::accumulate(const MlpGrads& other) {
  for (std::size_t l = 0; l < d_weights.size(); ++l) {
    d_weights[l] += other.d_weights[l];
    d_biases[l] += other.d_biases[l];
  }
}

void MlpGrads::scale(double factor) {
  for (std::size_t l = 0; l < d_weights.size(); ++l) {
    d_weights[l] *= factor;
    d_biases[l] *= factor;
  }
}

double MlpGrads::max_abs() const {
  double m = 0.0;
  for (std::size_t l = 0; l < d_weights.size(); ++l) {
    m = std::max(m, d_weights[l].cwiseAbs().maxCoeff());
    m = std::max(m, d_biases[l].cwiseAbs().maxCoeff());
  }
  return m;
}

MlpGrads backward(const Mlp& net, const MlpTrace& trace, const Eigen::MatrixXd& d_output) {
  if (trace.post.empty())
    throw std::logic_error("backward: forward trace is empty");
  if (d_output.rows() != net.output_dim() || d_output.cols() != trace.output().cols())
    throw std::invalid_argument("backward: upstream gradient shape mismatch");

  MlpGrads grads;
  grads.d_weights.resize(net.weights.size());
  grads.d_biases.resize(net.biases.size());

  Eigen::MatrixXd dz = d_output;  // output layer is linear
  for (int l = net.num_layers() - 1; l >= 0; --l) {
    const std::size_t li = static_cast<std::size_t>(l);
    const Eigen::MatrixXd& below = (l == 0) ? trace.input : trace.post[li - 1];
    grads.d_weights[li] = dz * below.transpose();
    grads.d_biases[li] = dz.rowwise().sum();
    Eigen::MatrixXd d_below = net.weights[li].transpose() * dz;
    if (l > 0) {
      // chain through the tanh of the layer below
      d_below.array() *= 1.0 - trace.post[li - 1].array().square();
    }
    dz = std::move(d_below);
  }
  grads.d_input = std::move(dz);
  return grads;
}

OptimizerState OptimizerState::create(const Mlp& net, double lr, OptimizerKind kind) {
  OptimizerState s;
  s.kind = kind;
  s.lr = lr;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    s.m_w.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.v_w.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.m_b.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    s.v_b.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  return s;
}

namespace {

template <typename Param, typename Grad, typename Mom>
void adam_one(Param& p, const Grad& g, Mom& m, Mom& v, const OptimizerState& opt,
              double bias1, double bias2) {
  m = opt.beta1 * m + (1.0 - opt.beta1) * g;
  v = opt.beta2 * v.array().matrix() + (1.0 - opt.beta2) * g.array().square().matrix();
  const auto m_hat = m.array() / bias1;
  const auto v_hat = v.array() / bias2;
  p.array() -= opt.lr * m_hat / (v_hat.sqrt() + opt.eps);
}

}  // namespace

void apply_update(Mlp& net, OptimizerState& opt, const MlpGrads& grads) {
  if (grads.d_weights.size() != net.weights.size())
    throw std::invalid_argument("apply_update: gradient/parameter shape mismatch");
  if (opt.kind == OptimizerKind::sgd) {
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      net.weights[l] -= opt.lr * grads.d_weights[l];
      net.biases[l] -= opt.lr * grads.d_biases[l];
    }
    return;
  }
  opt.step += 1;
  const double bias1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
  const double bias2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    if (grads.d_weights[l].rows() != net.weights[l].rows() ||
        grads.d_weights[l].cols() != net.weights[l].cols())
      throw std::invalid_argument("apply_update: gradient shape mismatch");
    adam_one(net.weights[l], grads.d_weights[l], opt.m_w[l], opt.v_w[l], opt, bias1, bias2);
    adam_one(net.biases[l], grads.d_biases[l], opt.m_b[l], opt.v_b[l], opt, bias1, bias2);
  }
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (tau <= 0.0 || tau > 1.0)
    throw std::invalid_argument("soft_update: tau must be in (0, 1]");
  if (target.dims != online.dims)
    throw std::invalid_argument("soft_update: network shapes disagree");
  for (std::size_t l = 0; l < target.weights.size(); ++l) {
    target.weights[l] = tau * online.weights[l] + (1.0 - tau) * target.weights[l];
    target.biases[l] = tau * online.biases[l] + (1.0 - tau) * target.biases[l];
  }
}

GaussianHead split_gaussian_head(const Eigen::VectorXd& net_output) {
  if (net_output.size() % 2 != 0)
    throw std::invalid_argument("split_gaussian_head: output dim must be even");
  const Eigen::Index a = net_output.size() / 2;
  GaussianHead head;
  head.mean = net_output.head(a);
  head.log_std = net_output.tail(a).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  return head;
}

double tanh_gaussian_log_prob(const GaussianHead& head, const Eigen::VectorXd& pre_squash) {
  constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5*log(2*pi)
  double lp = 0.0;
  for (Eigen::Index i = 0; i < head.mean.size(); ++i) {
    const double sigma = std::exp(head.log_std(i));
    const double zscore = (pre_squash(i) - head.mean(i)) / sigma;
    lp += -kHalfLog2Pi - head.log_std(i) - 0.5 * zscore * zscore;
    const double t = std::tanh(pre_squash(i));
    lp -= std::log(1.0 - t * t + 1e-6);
  }
  return lp;
}

ReparameterizedSample sample_reparameterized(const GaussianHead& head, RngStream& rng) {
  const Eigen::Index a = head.mean.size();
  ReparameterizedSample s;
  s.noise.resize(a);
  s.pre_squash.resize(a);
  s.action.resize(a);
  for (Eigen::Index i = 0; i < a; ++i) {
    s.noise(i) = rng.gaussian();
    s.pre_squash(i) = head.mean(i) + s.noise(i) * std::exp(head.log_std(i));
    s.action(i) = std::tanh(s.pre_squash(i));
  }
  s.log_prob = tanh_gaussian_log_prob(head, s.pre_squash);
  return s;
}

// --- serialization -----------------------------------------------------------

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<unsigned char, 4> b{static_cast<unsigned char>(v & 0xFF),
                                 static_cast<unsigned char>((v >> 8) & 0xFF),
                                 static_cast<unsigned char>((v >> 16) & 0xFF),
                                 static_cast<unsigned char>((v >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(b.data()), 4);
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in) throw std::runtime_error("checkpoint: truncated stream");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = (bits >> (8 * i)) & 0xFF;
  out.write(reinterpret_cast<const char*>(b.data()), 8);
}

double get_f64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  in.read(reinterpret_cast<char*>(b.data()), 8);
  if (!in) throw std::runtime_error("checkpoint: truncated stream");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

constexpr char kMlpMagic[8] = {'A', 'A', 'R', 'I', 'S', 'N', 'N', '1'};
constexpr char kCkptMagic[8] = {'A', 'A', 'R', 'I', 'S', 'C', 'K', '1'};
constexpr std::uint32_t kFormatVersion = 1;

}  // namespace

void save_mlp(std::ostream& out, const Mlp& net) {
  out.write(kMlpMagic, 8);
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(net.dims.size()));
  for (int d : net.dims) put_u32(out, static_cast<std::uint32_t>(d));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const auto& w = net.weights[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) put_f64(out, w(i, j));
    }
    for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) put_f64(out, net.biases[l](i));
  }
}

Mlp load_mlp(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMlpMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad network magic");
  const std::uint32_t version = get_u32(in);
  if (version != kFormatVersion) throw std::runtime_error("checkpoint: unsupported version");
  const std::uint32_t ndims = get_u32(in);
  if (ndims < 2 || ndims > 64) throw std::runtime_error("checkpoint: implausible layer count");
  Mlp net;
  net.dims.resize(ndims);
  for (auto& d : net.dims) d = static_cast<int>(get_u32(in));
  for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
    Eigen::MatrixXd w(net.dims[l + 1], net.dims[l]);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = get_f64(in);
    }
    Eigen::VectorXd b(net.dims[l + 1]);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = get_f64(in);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

void save_checkpoint(const std::string& path, const std::map<std::string, Mlp>& nets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  out.write(kCkptMagic, 8);
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(nets.size()));
  for (const auto& [name, net] : nets) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    save_mlp(out, net);
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

std::map<std::string, Mlp> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCkptMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad file magic");
  const std::uint32_t version = get_u32(in);
  if (version != kFormatVersion) throw std::runtime_error("checkpoint: unsupported version");
  const std::uint32_t count = get_u32(in);
  std::map<std::string, Mlp> nets;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t len = get_u32(in);
    std::string name(len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(len));
    if (!in) throw std::runtime_error("checkpoint: truncated name");
    nets.emplace(std::move(name), load_mlp(in));
  }
  return nets;
}

}  // namespace aaris
