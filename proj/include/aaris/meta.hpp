// SPDX-License-Identifier: Apache-2.0
//
// Meta-training across user-placement tasks and meta-adaptation on a
// held-out task. First-order scheme: per-task copies adapt with plain SGD
// inner steps; the outer step applies the summed validation gradients,
// evaluated at the adapted parameters, to the global networks.

#ifndef AARIS_META_HPP
#define AARIS_META_HPP

#include "aaris/agents.hpp"

namespace aaris {

struct MetaConfig {
  int n_tasks = 5;
  int n_inner = 1;            // SGD steps per task per slot
  double beta_meta = 1e-4;    // outer learning rate
  int episodes_train = 200;
  int episodes_adapt = 100;
  std::size_t batch = 256;
  std::size_t buffer_capacity = 100000;
  std::size_t warmup_steps = 0;
};

/// One inner-loop adaptation: n_inner plain-SGD steps on batches sampled
/// from the task buffer, with the target nets tracking as in single-task training.
/// The adapted agents are modified in place; whatever they were copied
/// from stays untouched.
void inner_adapt(SacDiscreteAgent& sac, Td3Agent& td3, const ReplayBuffer& buffer,
                 int n_inner, std::size_t batch, RngStream& rng);

/// One outer step: per ready task, sample a validation batch, evaluate the
/// loss gradients at the adapted parameters, sum over tasks and apply the
/// sum to the global networks with step size beta_meta. Every task reuses
/// the same rng state so that identical tasks contribute identical
/// gradients. Returns the number of tasks that contributed.
int outer_update(SacDiscreteAgent& global_sac, Td3Agent& global_td3,
                 const std::vector<SacDiscreteAgent>& adapted_sac,
                 const std::vector<Td3Agent>& adapted_td3,
                 const std::vector<ReplayBuffer*>& buffers, double beta_meta,
                 std::size_t batch, RngStream& rng);

struct MetaHistory {
  // history[e][t]: mean reward of task t in episode e
  std::vector<std::vector<double>> task_mean_reward;
  std::vector<double> mean_reward;  // over tasks
  std::vector<double> mean_ee;
  std::vector<double> mean_sum_rate;
};

class MetaTrainer {
 public:
  MetaTrainer(EnvConfig env_cfg, SacConfig sac_cfg, Td3Config td3_cfg, MetaConfig meta_cfg,
              std::vector<TaskSpec> tasks, std::uint64_t seed);

  /// Runs the full meta-training phase; returns per-episode history.
  MetaHistory train();

  /// Runs a single meta-training episode (exposed for incremental drivers).
  void train_episode(int episode_index, MetaHistory& history);

  const SacDiscreteAgent& global_sac() const { return global_sac_; }
  const Td3Agent& global_td3() const { return global_td3_; }
  const std::vector<TaskSpec>& tasks() const { return tasks_; }
  const MetaConfig& meta_config() const { return meta_cfg_; }

 private:
  EnvConfig env_cfg_;
  SacConfig sac_cfg_;
  Td3Config td3_cfg_;
  MetaConfig meta_cfg_;
  std::vector<TaskSpec> tasks_;
  RngStream rng_;
  SacDiscreteAgent global_sac_;
  Td3Agent global_td3_;
  std::vector<Environment> envs_;
  std::vector<ReplayBuffer> buffers_;
};

struct AdaptResult {
  SacDiscreteAgent sac;
  Td3Agent td3;
  std::vector<double> reward_curve;  // per adaptation episode
  std::vector<double> ee_curve;
  std::vector<double> sum_rate_curve;
};

/// Fresh agents initialized from the globals (targets re-synced), then the
/// standard MSAT loop on the new task for episodes_adapt episodes.
AdaptResult meta_adapt(const SacDiscreteAgent& global_sac, const Td3Agent& global_td3,
                       const EnvConfig& env_cfg, const MetaConfig& meta_cfg,
                       const TaskSpec& new_task, int episodes_adapt, std::uint64_t seed);

}  // namespace aaris

#endif  // AARIS_META_HPP
