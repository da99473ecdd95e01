// SPDX-License-Identifier: Apache-2.0
//
// The two learning heads and their composition. The modified-SAC head
// drives the discrete element-selection mask (tanh-squashed Gaussian
// samples thresholded to bits); the TD3 head drives every continuous
// action. Both train off one shared replay buffer of joint transitions,
// each reading its own action slice.

#ifndef AARIS_AGENTS_HPP
#define AARIS_AGENTS_HPP

#include "aaris/env.hpp"
#include "aaris/nn.hpp"

namespace aaris {

struct Transition {
  VectorXd state;
  std::vector<std::uint8_t> mask;
  VectorXd cont;
  double reward = 0.0;
  VectorXd next_state;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return data_[i]; }

  /// Uniform indices with replacement; requires size() >= 1.
  std::vector<std::size_t> sample_indices(std::size_t batch, RngStream& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

struct LossReport {
  double critic1 = 0.0;
  double critic2 = 0.0;
  double actor = 0.0;
  bool actor_updated = false;
};

/// Gradients for one agent's three online networks.
struct GradSet {
  MlpGrads actor;
  MlpGrads critic1;
  MlpGrads critic2;
};

struct SacConfig {
  std::vector<int> hidden{256, 256};
  double temperature = 0.2;  // fixed entropy weight
  double reward_scale = 1.0;  // critics regress r/reward_scale
  double gamma = 0.99;
  double tau = 0.005;        // 0 disables target tracking
  double lr_critic1 = 3e-4;
  double lr_critic2 = 3e-4;
  double lr_actor = 3e-4;
  OptimizerKind optimizer = OptimizerKind::adam;
};

/// Soft actor-critic with a thresholded-Gaussian discrete head.
class SacDiscreteAgent {
 public:
  SacDiscreteAgent(int state_dim, int mask_dim, const SacConfig& cfg, RngStream& init_rng);

  struct MaskSample {
    std::vector<std::uint8_t> bits;
    VectorXd squashed;  // tanh sample the bits were thresholded from
  };
  /// explore=false thresholds tanh(mean); exact zeros map to bit 0.
  MaskSample select_mask(const VectorXd& state, bool explore, RngStream& rng) const;

  /// Regression targets y = r + gamma * (min_i targetq_i(s', a') - lambda*logpi).
  VectorXd critic_targets(const std::vector<const Transition*>& batch, RngStream& rng) const;

  GradSet compute_gradients(const std::vector<const Transition*>& batch, RngStream& rng,
                            LossReport* report = nullptr) const;

  LossReport update(const ReplayBuffer& buffer, std::size_t batch, RngStream& rng);

  void apply_sgd(const GradSet& grads, double lr_actor, double lr_critic1, double lr_critic2);
  void soft_update_targets();
  void sync_targets();  // targets <- online copies

  double critic_mse(int which, const std::vector<const Transition*>& batch,
                    const VectorXd& targets) const;

  int state_dim() const { return state_dim_; }
  int mask_dim() const { return mask_dim_; }
  const SacConfig& config() const { return cfg_; }

  Mlp actor, critic1, critic2, target_critic1, target_critic2;

 private:
  MatrixXd critic_input(const std::vector<const Transition*>& batch) const;

  int state_dim_;
  int mask_dim_;
  SacConfig cfg_;
  OptimizerState opt_actor_, opt_critic1_, opt_critic2_;
};

struct Td3Config {
  std::vector<int> hidden{256, 256};
  double reward_scale = 1.0;  // critics regress r/reward_scale
  double gamma = 0.99;
  double tau_critic = 0.005;
  double tau_actor = 0.005;
  int policy_delay = 2;
  double smoothing_std = 0.2;   // target-action noise
  double smoothing_clip = 0.5;  // c
  double explore_std = 0.1;     // behaviour noise
  double preact_reg = 0.0;      // L2 weight on the actor's pre-tanh output
  double a_min = -1.0;
  double a_max = 1.0;
  double lr_critic1 = 3e-4;
  double lr_critic2 = 3e-4;
  double lr_actor = 3e-4;
  OptimizerKind optimizer = OptimizerKind::adam;
  bool literal_actor_sign = false;  // debug: descend on q instead of ascending
};

class Td3Agent {
 public:
  Td3Agent(int state_dim, int action_dim, const Td3Config& cfg, RngStream& init_rng);

  /// tanh-squashed deterministic policy; explore adds clipped N(0, explore_std).
  VectorXd select_action(const VectorXd& state, bool explore, RngStream& rng) const;

  /// clip(target_actor(s') + clip(noise, -c, c), a_min, a_max).
  VectorXd target_action(const VectorXd& next_state, RngStream& rng) const;
  /// Same smoothing rule with the noise supplied by the caller.
  VectorXd target_action(const VectorXd& next_state, const VectorXd& noise) const;

  VectorXd critic_targets(const std::vector<const Transition*>& batch, RngStream& rng) const;

  /// Gradients for all three nets (no delay logic; used by the meta loops).
  GradSet compute_gradients(const std::vector<const Transition*>& batch, RngStream& rng,
                            LossReport* report = nullptr) const;

  /// Critics every call; actor and all targets on every policy_delay-th call.
  LossReport update(const ReplayBuffer& buffer, std::size_t batch, RngStream& rng);

  void apply_sgd(const GradSet& grads, double lr_actor, double lr_critic1, double lr_critic2);
  void soft_update_targets();
  void sync_targets();

  double critic_mse(int which, const std::vector<const Transition*>& batch,
                    const VectorXd& targets) const;

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  long update_count() const { return update_count_; }
  const Td3Config& config() const { return cfg_; }

  Mlp actor, target_actor, critic1, critic2, target_critic1, target_critic2;

 private:
  MatrixXd critic_input(const std::vector<const Transition*>& batch) const;

  int state_dim_;
  int action_dim_;
  Td3Config cfg_;
  OptimizerState opt_actor_, opt_critic1_, opt_critic2_;
  long update_count_ = 0;
};

/// Uniform random action over the joint space (warmup behaviour).
JointAction uniform_joint_action(const EnvConfig& cfg, RngStream& rng);

/// Warmup exploration: magnitude-stratified uniform coordinates (plain
/// uniform beams almost never land inside the transmit-power ball) and a
/// persistent random-walk velocity so the acceleration check stays
/// reachable in the warmup data.
class WarmupSampler {
 public:
  explicit WarmupSampler(const EnvConfig& cfg);
  JointAction draw(RngStream& rng);

 private:
  const EnvConfig& cfg_;
  int velocity_offset_;
  double walk_std_;
  Vector2d velocity_{0.0, 0.0};
};

/// One joint action: mask from the SAC head, continuous part from TD3.
JointAction msat_act(const SacDiscreteAgent& sac, const Td3Agent& td3, const VectorXd& state,
                     bool explore, RngStream& rng);

struct EpisodeMetrics {
  double mean_reward = 0.0;
  double mean_ee = 0.0;
  double mean_sum_rate = 0.0;
  std::array<long, 13> violation_counts{};
};

/// Runs one episode: act, store, and (once the buffer holds a batch) one
/// SAC update plus one TD3 update per slot on independently sampled
/// batches. While the buffer holds fewer than `random_until` transitions
/// the behaviour policy is uniform random (pure exploration warmup).
/// Pass `detail` to capture per-slot metrics.
EpisodeMetrics msat_train_episode(Environment& env, SacDiscreteAgent& sac, Td3Agent& td3,
                                  ReplayBuffer& buffer, std::size_t batch, RngStream& rng,
                                  const TaskSpec* task = nullptr,
                                  std::vector<SlotMetrics>* detail = nullptr,
                                  bool learn = true, std::size_t random_until = 0);

/// Greedy (explore=false) evaluation episode; no buffer writes.
EpisodeMetrics msat_eval_episode(Environment& env, const SacDiscreteAgent& sac,
                                 const Td3Agent& td3, RngStream& rng,
                                 const TaskSpec* task = nullptr);

std::map<std::string, Mlp> agents_to_checkpoint(const SacDiscreteAgent& sac,
                                                const Td3Agent& td3);
void agents_from_checkpoint(const std::map<std::string, Mlp>& nets, SacDiscreteAgent& sac,
                            Td3Agent& td3);

}  // namespace aaris

#endif  // AARIS_AGENTS_HPP
