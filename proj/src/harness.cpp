// SPDX-License-Identifier: Apache-2.0
#include "aaris/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace aaris {

std::vector<TaskSpec> make_tasks(const ExperimentConfig& cfg, int count) {
  RngStream rng = RngStream(cfg.env.seed).derive(0x7A5C);
  std::vector<TaskSpec> tasks;
  tasks.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    tasks.push_back(random_task(t, cfg.env, rng));
  }
  return tasks;
}

TaskSpec held_out_task(const ExperimentConfig& cfg) {
  RngStream rng = RngStream(cfg.env.seed).derive(0x7A5C);
  // burn the training placements so the held-out one is fresh
  for (int t = 0; t < cfg.meta.n_tasks; ++t) random_task(t, cfg.env, rng);
  return random_task(cfg.meta.n_tasks, cfg.env, rng);
}

RisVariant variant_for(Baseline baseline) {
  switch (baseline) {
    case Baseline::passive_ris: return RisVariant::aerial_passive;
    case Baseline::fixed_ris: return RisVariant::fixed_active;
    case Baseline::mmsat:
    case Baseline::msat: return RisVariant::aerial_active;
  }
  return RisVariant::aerial_active;
}

namespace {

MetricsRecord make_record(int episode, Baseline baseline, std::uint64_t seed,
                          const EpisodeMetrics& m, double wall_s) {
  MetricsRecord r;
  r.episode = episode;
  r.baseline = to_string(baseline);
  r.seed = seed;
  r.mean_reward = m.mean_reward;
  r.avg_ee = m.mean_ee;
  r.avg_sum_rate = m.mean_sum_rate;
  r.violations = m.violation_counts;
  r.wall_clock_s = wall_s;
  return r;
}

RunResult run_msat(const ExperimentConfig& cfg, Baseline baseline, std::uint64_t seed,
                   JsonlSink* sink) {
  EnvConfig env_cfg = cfg.env;
  env_cfg.variant = variant_for(baseline);
  env_cfg.seed = seed;
  env_cfg.finalize();
  Environment env(env_cfg);

  RngStream rng(seed);
  RngStream init_rng = rng.derive(0x1217);
  SacDiscreteAgent sac(env.state_dim(), env.mask_dim(), cfg.agent.sac, init_rng);
  Td3Agent td3(env.state_dim(), env.cont_action_dim(), cfg.agent.td3, init_rng);
  ReplayBuffer buffer(cfg.agent.buffer_capacity);

  RngStream task_rng = RngStream(env_cfg.seed).derive(0xD0C5);
  const TaskSpec base_task = random_task(0, env_cfg, task_rng);

  RunResult result;
  const auto t0 = std::chrono::steady_clock::now();
  for (int e = 0; e < cfg.agent.episodes; ++e) {
    TaskSpec episode_task = base_task;
    episode_task.mobility_seed ^= static_cast<std::uint64_t>(e) * 0x9E37 + 1;
    const EpisodeMetrics m =
        msat_train_episode(env, sac, td3, buffer, cfg.agent.batch, rng, &episode_task,
                           nullptr, true, cfg.agent.warmup_steps);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.records.push_back(make_record(e, baseline, seed, m, wall));
    if (sink != nullptr) sink->write(result.records.back());
  }
  result.checkpoint = agents_to_checkpoint(sac, td3);
  return result;
}

RunResult run_meta(const ExperimentConfig& cfg, Baseline baseline, std::uint64_t seed,
                   JsonlSink* sink) {
  EnvConfig env_cfg = cfg.env;
  env_cfg.variant = variant_for(baseline);
  env_cfg.seed = seed;
  env_cfg.finalize();

  ExperimentConfig task_source = cfg;
  task_source.env = env_cfg;
  const std::vector<TaskSpec> tasks = make_tasks(task_source, cfg.meta.n_tasks);

  MetaConfig meta_cfg = cfg.meta;
  meta_cfg.episodes_train = cfg.agent.episodes;
  MetaTrainer trainer(env_cfg, cfg.agent.sac, cfg.agent.td3, meta_cfg, tasks, seed);

  RunResult result;
  MetaHistory history;
  const auto t0 = std::chrono::steady_clock::now();
  for (int e = 0; e < meta_cfg.episodes_train; ++e) {
    trainer.train_episode(e, history);
    EpisodeMetrics m;
    m.mean_reward = history.mean_reward.back();
    m.mean_ee = history.mean_ee.back();
    m.mean_sum_rate = history.mean_sum_rate.back();
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.records.push_back(make_record(e, baseline, seed, m, wall));
    if (sink != nullptr) sink->write(result.records.back());
  }
  result.checkpoint = agents_to_checkpoint(trainer.global_sac(), trainer.global_td3());
  return result;
}

}  // namespace

RunResult run_baseline(const ExperimentConfig& cfg, Baseline baseline, std::uint64_t seed,
                       JsonlSink* sink) {
  if (baseline == Baseline::msat) return run_msat(cfg, baseline, seed, sink);
  return run_meta(cfg, baseline, seed, sink);
}

int worker_count() {
  if (const char* env = std::getenv("AARIS_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, SweepAxis axis, double value) {
  ExperimentConfig out = cfg;
  switch (axis) {
    case SweepAxis::ris_elements: {
      const int m = static_cast<int>(value);
      const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
      if (side * side == m) {
        out.env.channel.mx = side;
        out.env.channel.my = side;
      } else {
        out.env.channel.mx = m;
        out.env.channel.my = 1;
      }
      break;
    }
    case SweepAxis::bs_power_dbm:
      out.env.bs_power.p_max = dbm_to_watt(value);
      break;
    case SweepAxis::bs_antennas:
      out.env.channel.n_bs = static_cast<int>(value);
      break;
    case SweepAxis::qos:
      out.env.qos = VectorXd::Constant(out.env.k_users, value);
      break;
    case SweepAxis::none:
      throw std::invalid_argument("apply_sweep_value: no sweep axis configured");
  }
  out.env.finalize();
  return out;
}

double final_window_mean_ee(const std::vector<MetricsRecord>& records) {
  if (records.empty()) throw std::invalid_argument("final_window_mean_ee: no records");
  const std::size_t window = std::max<std::size_t>(1, records.size() / 10);
  double acc = 0.0;
  for (std::size_t i = records.size() - window; i < records.size(); ++i) {
    acc += records[i].avg_ee;
  }
  return acc / static_cast<double>(window);
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg,
                            std::vector<SweepPointResult>* raw_points) {
  if (cfg.sweep.axis == SweepAxis::none)
    throw std::invalid_argument("sweep: no axis configured");
  if (cfg.sweep.values.size() < 2)
    throw std::invalid_argument("sweep: need at least two axis values");
  if (cfg.seeds.size() < 3) throw std::invalid_argument("sweep: need at least three seeds");

  struct Job {
    double value;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double v : cfg.sweep.values) {
    for (std::uint64_t s : cfg.seeds) jobs.push_back({v, s});
  }
  std::vector<SweepPointResult> results(jobs.size());

  std::filesystem::create_directories(cfg.out_dir);
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job job = jobs[i];
      const ExperimentConfig point_cfg = apply_sweep_value(cfg, cfg.sweep.axis, job.value);
      std::ostringstream name;
      name << "metrics_" << to_string(cfg.baseline) << "_" << to_string(cfg.sweep.axis) << "_"
           << format_double(job.value) << "_seed" << job.seed << ".jsonl";
      JsonlSink sink((std::filesystem::path(cfg.out_dir) / name.str()).string());
      const RunResult run = run_baseline(point_cfg, cfg.baseline, job.seed, &sink);
      results[i] = {job.value, job.seed, final_window_mean_ee(run.records), run.records};
    }
  };
  const int n_workers = std::min<int>(worker_count(), static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  std::vector<SweepRow> rows;
  for (double v : cfg.sweep.values) {
    double sum = 0.0;
    double sum2 = 0.0;
    int n = 0;
    for (const auto& res : results) {
      if (res.axis_value == v) {
        sum += res.final_window_mean_ee;
        sum2 += res.final_window_mean_ee * res.final_window_mean_ee;
        ++n;
      }
    }
    SweepRow row;
    row.axis_value = v;
    row.baseline = to_string(cfg.baseline);
    row.n_seeds = n;
    row.mean_ee = sum / n;
    const double var = std::max(0.0, sum2 / n - row.mean_ee * row.mean_ee);
    row.std_ee = std::sqrt(var * static_cast<double>(n) / std::max(1, n - 1));
    rows.push_back(row);
  }
  emit_sweep_data(rows, to_string(cfg.sweep.axis), cfg.out_dir);
  if (raw_points != nullptr) *raw_points = std::move(results);
  return rows;
}

unsigned long long complexity_product(const std::vector<int>& layer_dims,
                                      unsigned long long batch, unsigned long long episodes,
                                      unsigned long long slots, unsigned long long tasks) {
  unsigned long long weight_sum = 0;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    weight_sum += static_cast<unsigned long long>(layer_dims[l]) *
                  static_cast<unsigned long long>(layer_dims[l + 1]);
  }
  return weight_sum * batch * episodes * slots * tasks;
}

ComplexityEstimate complexity_estimate(const ExperimentConfig& cfg) {
  std::vector<int> dims;
  dims.push_back(cfg.env.state_dim());
  dims.insert(dims.end(), cfg.agent.td3.hidden.begin(), cfg.agent.td3.hidden.end());
  dims.push_back(cfg.env.cont_action_dim());
  ComplexityEstimate est;
  est.meta_training_cost = complexity_product(
      dims, cfg.meta.batch, static_cast<unsigned long long>(cfg.meta.episodes_train),
      static_cast<unsigned long long>(cfg.env.horizon_slots),
      static_cast<unsigned long long>(cfg.meta.n_tasks));
  est.meta_adaptation_cost = complexity_product(
      dims, cfg.meta.batch, static_cast<unsigned long long>(cfg.meta.episodes_adapt),
      static_cast<unsigned long long>(cfg.env.horizon_slots), 1);
  return est;
}

}  // namespace aaris
