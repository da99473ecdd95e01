// SPDX-License-Identifier: Apache-2.0
//
// Experiment orchestration: baseline runs (MSAT, meta-trained variants),
// sweeps over system parameters with a worker pool, abstract complexity
// estimates and plot-data emission.

#ifndef AARIS_HARNESS_HPP
#define AARIS_HARNESS_HPP

#include "aaris/config.hpp"
#include "aaris/metrics.hpp"

namespace aaris {

/// Tasks used by the meta baselines; deterministic in the env seed.
std::vector<TaskSpec> make_tasks(const ExperimentConfig& cfg, int count);

/// The held-out placement used by `adapt` and the meta-advantage check.
TaskSpec held_out_task(const ExperimentConfig& cfg);

RisVariant variant_for(Baseline baseline);

struct RunResult {
  std::vector<MetricsRecord> records;
  std::map<std::string, Mlp> checkpoint;  // final online + target nets
};

/// Trains one baseline for one seed. msat runs the single-task loop;
/// mmsat/passive_ris/fixed_ris run meta-training over the task set (per-
/// episode records average over tasks). Pass a sink to stream records.
RunResult run_baseline(const ExperimentConfig& cfg, Baseline baseline, std::uint64_t seed,
                       JsonlSink* sink = nullptr);

/// Number of parallel workers: AARIS_WORKERS env var, else hardware.
int worker_count();

struct SweepPointResult {
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  double final_window_mean_ee = 0.0;
  std::vector<MetricsRecord> records;
};

/// Applies one axis value to a config copy (adjusting mx/my for element
/// sweeps, converting dBm for power sweeps).
ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, SweepAxis axis, double value);

/// Mean over the last max(1, episodes/10) records' avg_ee.
double final_window_mean_ee(const std::vector<MetricsRecord>& records);

/// Trains every (axis value, seed) point on a worker pool and aggregates
/// the final-window EE mean and std per point. Emits per-run JSONL files
/// and the sweep CSV into cfg.out_dir.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg,
                            std::vector<SweepPointResult>* raw_points = nullptr);

struct ComplexityEstimate {
  unsigned long long meta_training_cost = 0;
  unsigned long long meta_adaptation_cost = 0;
};

/// (sum_l h_l*h_{l+1}) * batch * episodes * slots * tasks.
unsigned long long complexity_product(const std::vector<int>& layer_dims,
                                      unsigned long long batch, unsigned long long episodes,
                                      unsigned long long slots, unsigned long long tasks);

ComplexityEstimate complexity_estimate(const ExperimentConfig& cfg);

}  // namespace aaris

#endif  // AARIS_HARNESS_HPP
