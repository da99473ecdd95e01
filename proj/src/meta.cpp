// SPDX-License-Identifier: Apache-2.0
#include "aaris/meta.hpp"

#include <stdexcept>

namespace aaris {

namespace {

std::vector<const Transition*> gather(const ReplayBuffer& buffer,
                                      const std::vector<std::size_t>& idx) {
  std::vector<const Transition*> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(&buffer.at(i));
  return out;
}

}  // namespace

void inner_adapt(SacDiscreteAgent& sac, Td3Agent& td3, const ReplayBuffer& buffer,
                 int n_inner, std::size_t batch, RngStream& rng) {
  if (buffer.size() < batch) return;  // not warm yet; skip silently
  for (int step = 0; step < n_inner; ++step) {
    {
      const auto ptrs = gather(buffer, buffer.sample_indices(batch, rng));
      const GradSet g = sac.compute_gradients(ptrs, rng);
      sac.apply_sgd(g, sac.config().lr_actor, sac.config().lr_critic1, sac.config().lr_critic2);
      if (sac.config().tau > 0.0) sac.soft_update_targets();
    }
    {
      const auto ptrs = gather(buffer, buffer.sample_indices(batch, rng));
      const GradSet g = td3.compute_gradients(ptrs, rng);
      td3.apply_sgd(g, td3.config().lr_actor, td3.config().lr_critic1, td3.config().lr_critic2);
      td3.soft_update_targets();
    }
  }
}

int outer_update(SacDiscreteAgent& global_sac, Td3Agent& global_td3,
                 const std::vector<SacDiscreteAgent>& adapted_sac,
                 const std::vector<Td3Agent>& adapted_td3,
                 const std::vector<ReplayBuffer*>& buffers, double beta_meta,
                 std::size_t batch, RngStream& rng) {
  const std::size_t n_tasks = buffers.size();
  if (adapted_sac.size() != n_tasks || adapted_td3.size() != n_tasks)
    throw std::invalid_argument("outer_update: task count mismatch");

  GradSet sum_sac;
  GradSet sum_td3;
  bool have_any = false;
  int contributed = 0;
  // Each task replays the same stream so equal tasks yield equal gradients.
  const RngStream base = rng.derive(rng.next_u64());
  for (std::size_t t = 0; t < n_tasks; ++t) {
    if (buffers[t]->size() < batch) {
      warn_once("outer_update_skip_task_" + std::to_string(t),
                "outer update: task buffer below batch size, skipping task " +
                    std::to_string(t));
      continue;
    }
    RngStream task_rng = base;
    const auto val = gather(*buffers[t], buffers[t]->sample_indices(batch, task_rng));
    const GradSet gs = adapted_sac[t].compute_gradients(val, task_rng);
    const GradSet gt = adapted_td3[t].compute_gradients(val, task_rng);
    if (!have_any) {
      sum_sac = gs;
      sum_td3 = gt;
      have_any = true;
    } else {
      sum_sac.actor.accumulate(gs.actor);
      sum_sac.critic1.accumulate(gs.critic1);
      sum_sac.critic2.accumulate(gs.critic2);
      sum_td3.actor.accumulate(gt.actor);
      sum_td3.critic1.accumulate(gt.critic1);
      sum_td3.critic2.accumulate(gt.critic2);
    }
    ++contributed;
  }
  if (have_any && beta_meta != 0.0) {
    global_sac.apply_sgd(sum_sac, beta_meta, beta_meta, beta_meta);
    global_td3.apply_sgd(sum_td3, beta_meta, beta_meta, beta_meta);
  }
  return contributed;
}

MetaTrainer::MetaTrainer(EnvConfig env_cfg, SacConfig sac_cfg, Td3Config td3_cfg,
                         MetaConfig meta_cfg, std::vector<TaskSpec> tasks, std::uint64_t seed)
    : env_cfg_(std::move(env_cfg)),
      sac_cfg_(sac_cfg),
      td3_cfg_(td3_cfg),
      meta_cfg_(meta_cfg),
      tasks_(std::move(tasks)),
      rng_(RngStream(seed).derive(0x4D455441)),
      global_sac_(env_cfg_.state_dim(), env_cfg_.mask_dim(), sac_cfg, rng_),
      global_td3_(env_cfg_.state_dim(), env_cfg_.cont_action_dim(), td3_cfg, rng_) {
  if (tasks_.empty()) throw std::invalid_argument("MetaTrainer: need at least one task");
  for (std::size_t t = 0; t < tasks_.size(); ++t) {
    EnvConfig cfg = env_cfg_;
    cfg.seed = env_cfg_.seed ^ (0x1000 + t);
    envs_.emplace_back(cfg);
    buffers_.emplace_back(meta_cfg_.buffer_capacity);
  }
}

void MetaTrainer::train_episode(int episode_index, MetaHistory& history) {
  const std::size_t n_tasks = tasks_.size();
  const int horizon = env_cfg_.horizon_slots;

  // Per-task copies re-synced from the globals at episode start.
  std::vector<SacDiscreteAgent> adapted_sac;
  std::vector<Td3Agent> adapted_td3;
  adapted_sac.reserve(n_tasks);
  adapted_td3.reserve(n_tasks);
  for (std::size_t t = 0; t < n_tasks; ++t) {
    adapted_sac.push_back(global_sac_);
    adapted_sac.back().sync_targets();
    adapted_td3.push_back(global_td3_);
    adapted_td3.back().sync_targets();
  }

  std::vector<VectorXd> state(n_tasks);
  std::vector<RngStream> task_rng;
  std::vector<double> reward_acc(n_tasks, 0.0);
  double ee_acc = 0.0;
  double rate_acc = 0.0;
  for (std::size_t t = 0; t < n_tasks; ++t) {
    TaskSpec episode_task = tasks_[t];
    episode_task.mobility_seed ^= static_cast<std::uint64_t>(episode_index) * 0x9E37 + 1;
    state[t] = envs_[t].reset(episode_task);
    task_rng.push_back(rng_.derive((static_cast<std::uint64_t>(episode_index) << 16) + t));
  }

  std::vector<ReplayBuffer*> buffer_ptrs;
  for (auto& b : buffers_) buffer_ptrs.push_back(&b);

  std::vector<WarmupSampler> warm_samplers;
  for (std::size_t t = 0; t < n_tasks; ++t) warm_samplers.emplace_back(envs_[t].config());

  for (int l = 0; l < horizon; ++l) {
    for (std::size_t t = 0; t < n_tasks; ++t) {
      const bool warm = buffers_[t].size() < meta_cfg_.warmup_steps;
      const JointAction a =
          warm ? warm_samplers[t].draw(task_rng[t])
               : msat_act(adapted_sac[t], adapted_td3[t], state[t], /*explore=*/true,
                          task_rng[t]);
      StepResult res = envs_[t].step(a);
      buffers_[t].push({state[t], a.sel_mask, a.raw_cont, res.reward, res.state});
      if (buffers_[t].size() >= std::max(meta_cfg_.batch, meta_cfg_.warmup_steps)) {
        inner_adapt(adapted_sac[t], adapted_td3[t], buffers_[t], meta_cfg_.n_inner,
                    meta_cfg_.batch, task_rng[t]);
      }
      reward_acc[t] += res.reward;
      ee_acc += res.metrics.ee;
      rate_acc += res.metrics.r_total;
      state[t] = std::move(res.state);
    }
    outer_update(global_sac_, global_td3_, adapted_sac, adapted_td3, buffer_ptrs,
                 meta_cfg_.beta_meta, meta_cfg_.batch, rng_);
  }

  std::vector<double> task_means(n_tasks);
  double mean_reward = 0.0;
  for (std::size_t t = 0; t < n_tasks; ++t) {
    task_means[t] = reward_acc[t] / horizon;
    mean_reward += task_means[t];
  }
  history.task_mean_reward.push_back(std::move(task_means));
  history.mean_reward.push_back(mean_reward / static_cast<double>(n_tasks));
  history.mean_ee.push_back(ee_acc / (horizon * static_cast<double>(n_tasks)));
  history.mean_sum_rate.push_back(rate_acc / (horizon * static_cast<double>(n_tasks)));
}

MetaHistory MetaTrainer::train() {
  MetaHistory history;
  for (int e = 0; e < meta_cfg_.episodes_train; ++e) {
    train_episode(e, history);
  }
  return history;
}

AdaptResult meta_adapt(const SacDiscreteAgent& global_sac, const Td3Agent& global_td3,
                       const EnvConfig& env_cfg, const MetaConfig& meta_cfg,
                       const TaskSpec& new_task, int episodes_adapt, std::uint64_t seed) {
  AdaptResult result{global_sac, global_td3, {}, {}, {}};
  result.sac.sync_targets();
  result.td3.sync_targets();

  EnvConfig cfg = env_cfg;
  cfg.seed = seed;
  Environment env(cfg);
  ReplayBuffer buffer(meta_cfg.buffer_capacity);
  RngStream rng = RngStream(seed).derive(0xADA9);

  for (int e = 0; e < episodes_adapt; ++e) {
    TaskSpec episode_task = new_task;
    episode_task.mobility_seed ^= static_cast<std::uint64_t>(e) * 0x9E37 + 1;
    // The behaviour policy is the meta-trained one from the first slot, so
    // no random warmup here; updates still wait until the buffer holds a
    // representative on-policy sample, otherwise the first few batches
    // drag the initialization around.
    const bool gathered = buffer.size() >= std::max(meta_cfg.batch, meta_cfg.warmup_steps / 4);
    const EpisodeMetrics m =
        msat_train_episode(env, result.sac, result.td3, buffer, meta_cfg.batch, rng,
                           &episode_task, nullptr, /*learn=*/gathered);
    result.reward_curve.push_back(m.mean_reward);
    result.ee_curve.push_back(m.mean_ee);
    result.sum_rate_curve.push_back(m.mean_sum_rate);
  }
  return result;
}

}  // namespace aaris
