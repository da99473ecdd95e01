// SPDX-License-Identifier: Apache-2.0
#include "aaris/agents.hpp"

#include <stdexcept>

namespace aaris {

namespace {

std::vector<int> net_dims(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims;
  dims.push_back(in);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

MatrixXd stack_states(const std::vector<const Transition*>& batch, bool next) {
  const Eigen::Index dim = next ? batch.front()->next_state.size() : batch.front()->state.size();
  MatrixXd s(dim, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    s.col(static_cast<Eigen::Index>(b)) = next ? batch[b]->next_state : batch[b]->state;
  }
  return s;
}

VectorXd stack_rewards(const std::vector<const Transition*>& batch) {
  VectorXd r(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) r(static_cast<Eigen::Index>(b)) = batch[b]->reward;
  return r;
}

std::vector<const Transition*> gather(const ReplayBuffer& buffer,
                                      const std::vector<std::size_t>& idx) {
  std::vector<const Transition*> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(&buffer.at(i));
  return out;
}

double clip(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  data_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, RngStream& rng) const {
  if (data_.empty()) throw std::logic_error("ReplayBuffer: cannot sample from an empty buffer");
  std::vector<std::size_t> idx(batch);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.integer(data_.size()));
  return idx;
}

// --- modified SAC ------------------------------------------------------------

SacDiscreteAgent::SacDiscreteAgent(int state_dim, int mask_dim, const SacConfig& cfg,
                                   RngStream& init_rng)
    : actor(Mlp::create(net_dims(state_dim, cfg.hidden, 2 * mask_dim), init_rng)),
      critic1(Mlp::create(net_dims(state_dim + mask_dim, cfg.hidden, 1), init_rng)),
      critic2(Mlp::create(net_dims(state_dim + mask_dim, cfg.hidden, 1), init_rng)),
      target_critic1(critic1),
      target_critic2(critic2),
      state_dim_(state_dim),
      mask_dim_(mask_dim),
      cfg_(cfg),
      opt_actor_(OptimizerState::create(actor, cfg.lr_actor, cfg.optimizer)),
      opt_critic1_(OptimizerState::create(critic1, cfg.lr_critic1, cfg.optimizer)),
      opt_critic2_(OptimizerState::create(critic2, cfg.lr_critic2, cfg.optimizer)) {}

SacDiscreteAgent::MaskSample SacDiscreteAgent::select_mask(const VectorXd& state, bool explore,
                                                           RngStream& rng) const {
  if (state.size() != state_dim_)
    throw std::invalid_argument("select_mask: state dimension mismatch");
  const GaussianHead head = split_gaussian_head(forward(actor, state));
  MaskSample out;
  if (explore) {
    const ReparameterizedSample s = sample_reparameterized(head, rng);
    out.squashed = s.action;
  } else {
    out.squashed = head.mean.array().tanh().matrix();
  }
  out.bits.resize(static_cast<std::size_t>(mask_dim_));
  for (int i = 0; i < mask_dim_; ++i) {
    out.bits[static_cast<std::size_t>(i)] = out.squashed(i) > 0.0 ? 1 : 0;
  }
  return out;
}

MatrixXd SacDiscreteAgent::critic_input(const std::vector<const Transition*>& batch) const {
  MatrixXd x(state_dim_ + mask_dim_, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto col = static_cast<Eigen::Index>(b);
    x.col(col).head(state_dim_) = batch[b]->state;
    for (int i = 0; i < mask_dim_; ++i) {
      x(state_dim_ + i, col) = static_cast<double>(batch[b]->mask[static_cast<std::size_t>(i)]);
    }
  }
  return x;
}

VectorXd SacDiscreteAgent::critic_targets(const std::vector<const Transition*>& batch,
                                          RngStream& rng) const {
  const auto bsz = static_cast<Eigen::Index>(batch.size());
  const MatrixXd s2 = stack_states(batch, true);
  const MatrixXd out = forward(actor, s2);
  const MatrixXd mu = out.topRows(mask_dim_);
  const MatrixXd ls = out.bottomRows(mask_dim_).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  const MatrixXd sig = ls.array().exp();

  MatrixXd eps(mask_dim_, bsz);
  for (Eigen::Index b = 0; b < bsz; ++b) {
    for (int i = 0; i < mask_dim_; ++i) eps(i, b) = rng.gaussian();
  }
  const MatrixXd z = mu + eps.cwiseProduct(sig);
  const MatrixXd a2 = z.array().tanh();

  MatrixXd x(state_dim_ + mask_dim_, bsz);
  x.topRows(state_dim_) = s2;
  x.bottomRows(mask_dim_) = (a2.array() > 0.0).cast<double>();  // critics see the bits

  const VectorXd q1 = forward(target_critic1, x).row(0);
  const VectorXd q2 = forward(target_critic2, x).row(0);

  constexpr double kHalfLog2Pi = 0.9189385332046727;
  VectorXd y(bsz);
  for (Eigen::Index b = 0; b < bsz; ++b) {
    double logpi = 0.0;
    for (int i = 0; i < mask_dim_; ++i) {
      logpi += -kHalfLog2Pi - ls(i, b) - 0.5 * eps(i, b) * eps(i, b);
      logpi -= std::log(1.0 - a2(i, b) * a2(i, b) + 1e-6);
    }
    y(b) = batch[b]->reward / cfg_.reward_scale +
           cfg_.gamma * (std::min(q1(b), q2(b)) - cfg_.temperature * logpi);
  }
  return y;
}

GradSet SacDiscreteAgent::compute_gradients(const std::vector<const Transition*>& batch,
                                            RngStream& rng, LossReport* report) const {
  const auto bsz = static_cast<Eigen::Index>(batch.size());
  const double inv_b = 1.0 / static_cast<double>(bsz);
  GradSet g;

  // critic regression toward the frozen target
  const VectorXd y = critic_targets(batch, rng);
  const MatrixXd xc = critic_input(batch);
  {
    const MlpTrace t1 = forward_trace(critic1, xc);
    const VectorXd err = t1.output().row(0).transpose() - y;
    if (report != nullptr) report->critic1 = err.squaredNorm() * inv_b;
    MatrixXd d1(1, bsz);
    d1.row(0) = 2.0 * inv_b * err.transpose();
    g.critic1 = backward(critic1, t1, d1);
  }
  {
    const MlpTrace t2 = forward_trace(critic2, xc);
    const VectorXd err = t2.output().row(0).transpose() - y;
    if (report != nullptr) report->critic2 = err.squaredNorm() * inv_b;
    MatrixXd d2(1, bsz);
    d2.row(0) = 2.0 * inv_b * err.transpose();
    g.critic2 = backward(critic2, t2, d2);
  }

  // actor: minimize lambda*logpi - min_i q_i, with fresh reparameterized draws
  const MatrixXd s = stack_states(batch, false);
  const MlpTrace ta = forward_trace(actor, s);
  const MatrixXd mu = ta.output().topRows(mask_dim_);
  const MatrixXd ls_raw = ta.output().bottomRows(mask_dim_);
  const MatrixXd clamp_mask =
      ((ls_raw.array() > kLogStdMin) && (ls_raw.array() < kLogStdMax)).cast<double>();
  const MatrixXd ls = ls_raw.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  const MatrixXd sig = ls.array().exp();
  MatrixXd eps(mask_dim_, bsz);
  for (Eigen::Index b = 0; b < bsz; ++b) {
    for (int i = 0; i < mask_dim_; ++i) eps(i, b) = rng.gaussian();
  }
  const MatrixXd z = mu + eps.cwiseProduct(sig);
  const MatrixXd a = z.array().tanh();

  // The critics consume mask bits in {0,1}; probe them with the matching
  // affine relaxation (tanh(z)+1)/2 so the actor never queries the
  // untrained half-cube below zero.
  MatrixXd xq(state_dim_ + mask_dim_, bsz);
  xq.topRows(state_dim_) = s;
  xq.bottomRows(mask_dim_) = (a.array() + 1.0) / 2.0;
  const MlpTrace t1 = forward_trace(critic1, xq);
  const MlpTrace t2 = forward_trace(critic2, xq);
  const Eigen::RowVectorXd q1 = t1.output().row(0);
  const Eigen::RowVectorXd q2 = t2.output().row(0);
  MatrixXd d1(1, bsz), d2(1, bsz);
  for (Eigen::Index b = 0; b < bsz; ++b) {
    const bool first = q1(b) <= q2(b);
    d1(0, b) = first ? -inv_b : 0.0;
    d2(0, b) = first ? 0.0 : -inv_b;
  }
  const MatrixXd da = (backward(critic1, t1, d1).d_input + backward(critic2, t2, d2).d_input)
                          .bottomRows(mask_dim_);

  const MatrixXd one_minus_a2 = 1.0 - a.array().square();
  // d/dz of the tanh log-prob correction
  const MatrixXd t_corr =
      (2.0 * a.array() * one_minus_a2.array() / (one_minus_a2.array() + 1e-6)).matrix();
  const MatrixXd dz_q = 0.5 * da.cwiseProduct(one_minus_a2);
  const double lam_b = cfg_.temperature * inv_b;

  MatrixXd d_out(2 * mask_dim_, bsz);
  d_out.topRows(mask_dim_) = lam_b * t_corr + dz_q;
  d_out.bottomRows(mask_dim_) =
      ((lam_b * (t_corr.cwiseProduct(eps.cwiseProduct(sig)).array() - 1.0)).matrix() +
       dz_q.cwiseProduct(eps.cwiseProduct(sig)))
          .cwiseProduct(clamp_mask);
  g.actor = backward(actor, ta, d_out);

  if (report != nullptr) {
    double actor_loss = 0.0;
    constexpr double kHalfLog2Pi = 0.9189385332046727;
    for (Eigen::Index b = 0; b < bsz; ++b) {
      double logpi = 0.0;
      for (int i = 0; i < mask_dim_; ++i) {
        logpi += -kHalfLog2Pi - ls(i, b) - 0.5 * eps(i, b) * eps(i, b);
        logpi -= std::log(1.0 - a(i, b) * a(i, b) + 1e-6);
      }
      actor_loss += cfg_.temperature * logpi - std::min(q1(b), q2(b));
    }
    report->actor = actor_loss * inv_b;
  }
  return g;
}

double SacDiscreteAgent::critic_mse(int which, const std::vector<const Transition*>& batch,
                                    const VectorXd& targets) const {
  const MatrixXd xc = critic_input(batch);
  const VectorXd q = forward(which == 1 ? critic1 : critic2, xc).row(0);
  return (q - targets).squaredNorm() / static_cast<double>(batch.size());
}

LossReport SacDiscreteAgent::update(const ReplayBuffer& buffer, std::size_t batch,
                                    RngStream& rng) {
  if (buffer.size() < batch)
    throw std::logic_error("SacDiscreteAgent::update: buffer smaller than batch");
  const auto ptrs = gather(buffer, buffer.sample_indices(batch, rng));
  LossReport report;
  const GradSet g = compute_gradients(ptrs, rng, &report);
  apply_update(critic1, opt_critic1_, g.critic1);
  apply_update(critic2, opt_critic2_, g.critic2);
  apply_update(actor, opt_actor_, g.actor);
  report.actor_updated = true;
  if (cfg_.tau > 0.0) soft_update_targets();
  return report;
}

void SacDiscreteAgent::apply_sgd(const GradSet& grads, double lr_actor, double lr_critic1,
                                 double lr_critic2) {
  for (std::size_t l = 0; l < actor.weights.size(); ++l) {
    actor.weights[l] -= lr_actor * grads.actor.d_weights[l];
    actor.biases[l] -= lr_actor * grads.actor.d_biases[l];
  }
  for (std::size_t l = 0; l < critic1.weights.size(); ++l) {
    critic1.weights[l] -= lr_critic1 * grads.critic1.d_weights[l];
    critic1.biases[l] -= lr_critic1 * grads.critic1.d_biases[l];
    critic2.weights[l] -= lr_critic2 * grads.critic2.d_weights[l];
    critic2.biases[l] -= lr_critic2 * grads.critic2.d_biases[l];
  }
}

void SacDiscreteAgent::soft_update_targets() {
  soft_update(target_critic1, critic1, cfg_.tau);
  soft_update(target_critic2, critic2, cfg_.tau);
}

void SacDiscreteAgent::sync_targets() {
  target_critic1 = critic1;
  target_critic2 = critic2;
}

// --- TD3 ----------------------------------------------------------------------

Td3Agent::Td3Agent(int state_dim, int action_dim, const Td3Config& cfg, RngStream& init_rng)
    : actor(Mlp::create(net_dims(state_dim, cfg.hidden, action_dim), init_rng)),
      target_actor(actor),
      critic1(Mlp::create(net_dims(state_dim + action_dim, cfg.hidden, 1), init_rng)),
      critic2(Mlp::create(net_dims(state_dim + action_dim, cfg.hidden, 1), init_rng)),
      target_critic1(critic1),
      target_critic2(critic2),
      state_dim_(state_dim),
      action_dim_(action_dim),
      cfg_(cfg),
      opt_actor_(OptimizerState::create(actor, cfg.lr_actor, cfg.optimizer)),
      opt_critic1_(OptimizerState::create(critic1, cfg.lr_critic1, cfg.optimizer)),
      opt_critic2_(OptimizerState::create(critic2, cfg.lr_critic2, cfg.optimizer)) {
  if (cfg.policy_delay < 1) throw std::invalid_argument("Td3Config: policy_delay must be >= 1");
}

VectorXd Td3Agent::select_action(const VectorXd& state, bool explore, RngStream& rng) const {
  if (state.size() != state_dim_)
    throw std::invalid_argument("select_action: state dimension mismatch");
  VectorXd a = forward(actor, state).array().tanh();
  if (explore) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a(i) = clip(a(i) + cfg_.explore_std * rng.gaussian(), cfg_.a_min, cfg_.a_max);
    }
  }
  return a;
}

VectorXd Td3Agent::target_action(const VectorXd& next_state, RngStream& rng) const {
  VectorXd noise(action_dim_);
  for (Eigen::Index i = 0; i < noise.size(); ++i) {
    noise(i) = cfg_.smoothing_std * rng.gaussian();
  }
  return target_action(next_state, noise);
}

VectorXd Td3Agent::target_action(const VectorXd& next_state, const VectorXd& noise) const {
  VectorXd a = forward(target_actor, next_state).array().tanh();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double n = clip(noise(i), -cfg_.smoothing_clip, cfg_.smoothing_clip);
    a(i) = clip(a(i) + n, cfg_.a_min, cfg_.a_max);
  }
  return a;
}

MatrixXd Td3Agent::critic_input(const std::vector<const Transition*>& batch) const {
  MatrixXd x(state_dim_ + action_dim_, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto col = static_cast<Eigen::Index>(b);
    x.col(col).head(state_dim_) = batch[b]->state;
    x.col(col).tail(action_dim_) = batch[b]->cont;
  }
  return x;
}

VectorXd Td3Agent::critic_targets(const std::vector<const Transition*>& batch,
                                  RngStream& rng) const {
  const auto bsz = static_cast<Eigen::Index>(batch.size());
  const MatrixXd s2 = stack_states(batch, true);
  MatrixXd a2 = forward(target_actor, s2).array().tanh();
  for (Eigen::Index b = 0; b < bsz; ++b) {
    for (Eigen::Index i = 0; i < a2.rows(); ++i) {
      const double noise =
          clip(cfg_.smoothing_std * rng.gaussian(), -cfg_.smoothing_clip, cfg_.smoothing_clip);
      a2(i, b) = clip(a2(i, b) + noise, cfg_.a_min, cfg_.a_max);
    }
  }
  MatrixXd x(state_dim_ + action_dim_, bsz);
  x.topRows(state_dim_) = s2;
  x.bottomRows(action_dim_) = a2;
  const VectorXd q1 = forward(target_critic1, x).row(0);
  const VectorXd q2 = forward(target_critic2, x).row(0);
  const VectorXd r = stack_rewards(batch);
  VectorXd y(bsz);
  for (Eigen::Index b = 0; b < bsz; ++b) {
    y(b) = r(b) / cfg_.reward_scale + cfg_.gamma * std::min(q1(b), q2(b));
  }
  return y;
}

GradSet Td3Agent::compute_gradients(const std::vector<const Transition*>& batch,
                                    RngStream& rng, LossReport* report) const {
  const auto bsz = static_cast<Eigen::Index>(batch.size());
  const double inv_b = 1.0 / static_cast<double>(bsz);
  GradSet g;

  const VectorXd y = critic_targets(batch, rng);
  const MatrixXd xc = critic_input(batch);
  {
    const MlpTrace t1 = forward_trace(critic1, xc);
    const VectorXd err = t1.output().row(0).transpose() - y;
    if (report != nullptr) report->critic1 = err.squaredNorm() * inv_b;
    MatrixXd d1(1, bsz);
    d1.row(0) = 2.0 * inv_b * err.transpose();
    g.critic1 = backward(critic1, t1, d1);
  }
  {
    const MlpTrace t2 = forward_trace(critic2, xc);
    const VectorXd err = t2.output().row(0).transpose() - y;
    if (report != nullptr) report->critic2 = err.squaredNorm() * inv_b;
    MatrixXd d2(1, bsz);
    d2.row(0) = 2.0 * inv_b * err.transpose();
    g.critic2 = backward(critic2, t2, d2);
  }

  // actor ascends q1(s, tanh(actor(s))); literal mode descends instead
  const MatrixXd s = stack_states(batch, false);
  const MlpTrace ta = forward_trace(actor, s);
  const MatrixXd a = ta.output().array().tanh();
  MatrixXd xq(state_dim_ + action_dim_, bsz);
  xq.topRows(state_dim_) = s;
  xq.bottomRows(action_dim_) = a;
  const MlpTrace t1 = forward_trace(critic1, xq);
  if (report != nullptr) report->actor = t1.output().row(0).mean();
  MatrixXd d_q(1, bsz);
  d_q.setConstant(cfg_.literal_actor_sign ? inv_b : -inv_b);
  const MatrixXd da = backward(critic1, t1, d_q).d_input.bottomRows(action_dim_);
  MatrixXd d_pre = da.cwiseProduct((1.0 - a.array().square()).matrix());
  if (cfg_.preact_reg > 0.0) {
    // keeps the pre-tanh outputs from running away into saturation
    d_pre += (2.0 * cfg_.preact_reg * inv_b) * ta.output();
  }
  g.actor = backward(actor, ta, d_pre);
  return g;
}

double Td3Agent::critic_mse(int which, const std::vector<const Transition*>& batch,
                            const VectorXd& targets) const {
  const MatrixXd xc = critic_input(batch);
  const VectorXd q = forward(which == 1 ? critic1 : critic2, xc).row(0);
  return (q - targets).squaredNorm() / static_cast<double>(batch.size());
}

LossReport Td3Agent::update(const ReplayBuffer& buffer, std::size_t batch, RngStream& rng) {
  if (buffer.size() < batch)
    throw std::logic_error("Td3Agent::update: buffer smaller than batch");
  const auto ptrs = gather(buffer, buffer.sample_indices(batch, rng));
  LossReport report;
  const GradSet g = compute_gradients(ptrs, rng, &report);
  update_count_ += 1;
  apply_update(critic1, opt_critic1_, g.critic1);
  apply_update(critic2, opt_critic2_, g.critic2);
  if (update_count_ % cfg_.policy_delay == 0) {
    apply_update(actor, opt_actor_, g.actor);
    report.actor_updated = true;
    soft_update_targets();
  }
  return report;
}

void Td3Agent::apply_sgd(const GradSet& grads, double lr_actor, double lr_critic1,
                         double lr_critic2) {
  for (std::size_t l = 0; l < actor.weights.size(); ++l) {
    actor.weights[l] -= lr_actor * grads.actor.d_weights[l];
    actor.biases[l] -= lr_actor * grads.actor.d_biases[l];
  }
  for (std::size_t l = 0; l < critic1.weights.size(); ++l) {
    critic1.weights[l] -= lr_critic1 * grads.critic1.d_weights[l];
    critic1.biases[l] -= lr_critic1 * grads.critic1.d_biases[l];
    critic2.weights[l] -= lr_critic2 * grads.critic2.d_weights[l];
    critic2.biases[l] -= lr_critic2 * grads.critic2.d_biases[l];
  }
}

void Td3Agent::soft_update_targets() {
  soft_update(target_critic1, critic1, cfg_.tau_critic);
  soft_update(target_critic2, critic2, cfg_.tau_critic);
  soft_update(target_actor, actor, cfg_.tau_actor);
}

void Td3Agent::sync_targets() {
  target_critic1 = critic1;
  target_critic2 = critic2;
  target_actor = actor;
}

// --- MSAT composition ---------------------------------------------------------

JointAction uniform_joint_action(const EnvConfig& cfg, RngStream& rng) {
  JointAction a = JointAction::zeros(cfg);
  for (auto& bit : a.sel_mask) bit = rng.uniform() < 0.5 ? 1 : 0;
  // One magnitude envelope per draw: plain uniform coordinates almost never
  // land inside the transmit-power ball once the beam block has many
  // coordinates, so stratify by norm to cover the feasible region too.
  const double envelope = rng.uniform();
  for (Eigen::Index i = 0; i < a.raw_cont.size(); ++i) {
    a.raw_cont(i) = envelope * rng.uniform(-1.0, 1.0);
  }
  return a;
}

WarmupSampler::WarmupSampler(const EnvConfig& cfg)
    : cfg_(cfg), velocity_offset_(action_layout(cfg).velocity) {
  // raw-unit step keeping the commanded acceleration within its bound
  const double accel_raw = cfg.a_max_uav * cfg.slot_dt / (cfg.v_max / std::sqrt(2.0));
  walk_std_ = accel_raw / 2.0;
}

JointAction WarmupSampler::draw(RngStream& rng) {
  JointAction a = JointAction::zeros(cfg_);
  for (auto& bit : a.sel_mask) bit = rng.uniform() < 0.5 ? 1 : 0;
  const double envelope = rng.uniform();
  for (Eigen::Index i = 0; i < a.raw_cont.size(); ++i) {
    a.raw_cont(i) = envelope * rng.uniform(-1.0, 1.0);
  }
  if (velocity_offset_ >= 0) {
    for (int i = 0; i < 2; ++i) {
      velocity_(i) = std::min(1.0, std::max(-1.0, velocity_(i) + walk_std_ * rng.gaussian()));
      a.raw_cont(velocity_offset_ + i) = velocity_(i);
    }
  }
  return a;
}

JointAction msat_act(const SacDiscreteAgent& sac, const Td3Agent& td3, const VectorXd& state,
                     bool explore, RngStream& rng) {
  if (sac.state_dim() != td3.state_dim() || state.size() != sac.state_dim())
    throw std::invalid_argument("msat_act: state dimension mismatch between heads");
  JointAction a;
  a.sel_mask = sac.select_mask(state, explore, rng).bits;
  a.raw_cont = td3.select_action(state, explore, rng);
  return a;
}

namespace {

EpisodeMetrics run_episode(Environment& env, const SacDiscreteAgent& sac_const,
                           const Td3Agent& td3_const, SacDiscreteAgent* sac, Td3Agent* td3,
                           ReplayBuffer* buffer, std::size_t batch, RngStream& rng,
                           const TaskSpec* task, std::vector<SlotMetrics>* detail, bool explore,
                           bool learn, std::size_t random_until) {
  VectorXd s = task ? env.reset(*task) : env.reset();
  EpisodeMetrics metrics;
  const int horizon = env.config().horizon_slots;
  WarmupSampler warm_sampler(env.config());
  for (int l = 0; l < horizon; ++l) {
    const bool warmup = buffer != nullptr && buffer->size() < random_until;
    const JointAction a = warmup ? warm_sampler.draw(rng)
                                 : msat_act(sac_const, td3_const, s, explore, rng);
    StepResult res = env.step(a);
    if (buffer != nullptr) {
      buffer->push({s, a.sel_mask, a.raw_cont, res.reward, res.state});
      const std::size_t learn_floor = std::max(batch, random_until);
      if (learn && buffer->size() >= learn_floor) {
        sac->update(*buffer, batch, rng);
        td3->update(*buffer, batch, rng);
      }
    }
    metrics.mean_reward += res.reward;
    metrics.mean_ee += res.metrics.ee;
    metrics.mean_sum_rate += res.metrics.r_total;
    for (int i = 0; i < 13; ++i) {
      metrics.violation_counts[static_cast<std::size_t>(i)] +=
          res.metrics.flags.sat[static_cast<std::size_t>(i)] ? 0 : 1;
    }
    if (detail != nullptr) detail->push_back(res.metrics);
    s = std::move(res.state);
  }
  metrics.mean_reward /= horizon;
  metrics.mean_ee /= horizon;
  metrics.mean_sum_rate /= horizon;
  return metrics;
}

}  // namespace

EpisodeMetrics msat_train_episode(Environment& env, SacDiscreteAgent& sac, Td3Agent& td3,
                                  ReplayBuffer& buffer, std::size_t batch, RngStream& rng,
                                  const TaskSpec* task, std::vector<SlotMetrics>* detail,
                                  bool learn, std::size_t random_until) {
  return run_episode(env, sac, td3, &sac, &td3, &buffer, batch, rng, task, detail,
                     /*explore=*/true, learn, random_until);
}

EpisodeMetrics msat_eval_episode(Environment& env, const SacDiscreteAgent& sac,
                                 const Td3Agent& td3, RngStream& rng, const TaskSpec* task) {
  return run_episode(env, sac, td3, nullptr, nullptr, nullptr, 0, rng, task, nullptr,
                     /*explore=*/false, /*learn=*/false, 0);
}

std::map<std::string, Mlp> agents_to_checkpoint(const SacDiscreteAgent& sac,
                                                const Td3Agent& td3) {
  return {{"sac.actor", sac.actor},
          {"sac.critic1", sac.critic1},
          {"sac.critic2", sac.critic2},
          {"sac.target_critic1", sac.target_critic1},
          {"sac.target_critic2", sac.target_critic2},
          {"td3.actor", td3.actor},
          {"td3.target_actor", td3.target_actor},
          {"td3.critic1", td3.critic1},
          {"td3.critic2", td3.critic2},
          {"td3.target_critic1", td3.target_critic1},
          {"td3.target_critic2", td3.target_critic2}};
}

void agents_from_checkpoint(const std::map<std::string, Mlp>& nets, SacDiscreteAgent& sac,
                            Td3Agent& td3) {
  auto fetch = [&](const char* name) -> const Mlp& {
    auto it = nets.find(name);
    if (it == nets.end())
      throw std::runtime_error(std::string("checkpoint: missing network ") + name);
    return it->second;
  };
  auto assign = [](Mlp& dst, const Mlp& src, const char* name) {
    if (dst.dims != src.dims)
      throw std::runtime_error(std::string("checkpoint: shape mismatch for ") + name);
    dst = src;
  };
  assign(sac.actor, fetch("sac.actor"), "sac.actor");
  assign(sac.critic1, fetch("sac.critic1"), "sac.critic1");
  assign(sac.critic2, fetch("sac.critic2"), "sac.critic2");
  assign(sac.target_critic1, fetch("sac.target_critic1"), "sac.target_critic1");
  assign(sac.target_critic2, fetch("sac.target_critic2"), "sac.target_critic2");
  assign(td3.actor, fetch("td3.actor"), "td3.actor");
  assign(td3.target_actor, fetch("td3.target_actor"), "td3.target_actor");
  assign(td3.critic1, fetch("td3.critic1"), "td3.critic1");
  assign(td3.critic2, fetch("td3.critic2"), "td3.critic2");
  assign(td3.target_critic1, fetch("td3.target_critic1"), "td3.target_critic1");
  assign(td3.target_critic2, fetch("td3.target_critic2"), "td3.target_critic2");
}

}  // namespace aaris
