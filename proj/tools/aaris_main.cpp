// SPDX-License-Identifier: Apache-2.0
//
// Experiment CLI: training runs, meta-training, adaptation on a held-out
// task, greedy evaluation, parameter sweeps, plot-data emission and the
// complexity estimator. Worker count for sweeps comes from AARIS_WORKERS.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "aaris/harness.hpp"

using namespace aaris;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string baseline;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool desk_scale = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config file");
  cmd->add_option("--out", opts.out_dir, "output directory override");
  cmd->add_option("--baseline", opts.baseline,
                  "mmsat | msat | passive_ris | fixed_ris");
  cmd->add_option("--seed", opts.seed, "seed override (first seed of the list)")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  cmd->add_flag("--desk-scale", opts.desk_scale, "apply the small desk-scale preset");
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
  ExperimentConfig cfg =
      opts.config_path.empty() ? default_experiment() : load_config(opts.config_path);
  if (opts.desk_scale) apply_desk_scale(cfg);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (!opts.baseline.empty()) cfg.baseline = baseline_from_string(opts.baseline);
  if (opts.seed_set) {
    cfg.seeds.clear();
    cfg.seeds.push_back(opts.seed);
  }
  validate_experiment(cfg);
  return cfg;
}

int run_training(const CommonOpts& opts, bool meta) {
  ExperimentConfig cfg = resolve_config(opts);
  if (meta && cfg.baseline == Baseline::msat) cfg.baseline = Baseline::mmsat;
  if (!meta) cfg.baseline = Baseline::msat;
  const std::uint64_t seed = cfg.seeds.empty() ? 1 : cfg.seeds.front();

  std::filesystem::create_directories(cfg.out_dir);
  JsonlSink sink((std::filesystem::path(cfg.out_dir) / "metrics.jsonl").string());
  const RunResult res = run_baseline(cfg, cfg.baseline, seed, &sink);
  const std::string ckpt =
      (std::filesystem::path(cfg.out_dir) / "checkpoint.bin").string();
  save_checkpoint(ckpt, res.checkpoint);
  emit_plot_data(res.records, cfg.out_dir);

  const double final_ee = final_window_mean_ee(res.records);
  std::cout << to_string(cfg.baseline) << " seed " << seed << ": " << res.records.size()
            << " episodes, final-window mean EE " << final_ee << " bits/Hz/J\n"
            << "metrics: " << sink.path() << "\ncheckpoint: " << ckpt << "\n";
  return 0;
}

int run_adapt(const CommonOpts& opts, const std::string& checkpoint_path, int episodes) {
  ExperimentConfig cfg = resolve_config(opts);
  const std::uint64_t seed = cfg.seeds.empty() ? 1 : cfg.seeds.front();

  EnvConfig env_cfg = cfg.env;
  env_cfg.variant = variant_for(cfg.baseline == Baseline::msat ? Baseline::mmsat : cfg.baseline);
  env_cfg.finalize();
  RngStream init(seed);
  SacDiscreteAgent sac(env_cfg.state_dim(), env_cfg.mask_dim(), cfg.agent.sac, init);
  Td3Agent td3(env_cfg.state_dim(), env_cfg.cont_action_dim(), cfg.agent.td3, init);
  agents_from_checkpoint(load_checkpoint(checkpoint_path), sac, td3);

  const TaskSpec task = held_out_task(cfg);
  const int e_adp = episodes > 0 ? episodes : cfg.meta.episodes_adapt;
  MetaConfig meta_cfg = cfg.meta;
  const AdaptResult res = meta_adapt(sac, td3, env_cfg, meta_cfg, task, e_adp, seed);

  std::filesystem::create_directories(cfg.out_dir);
  JsonlSink sink((std::filesystem::path(cfg.out_dir) / "metrics.jsonl").string());
  std::vector<MetricsRecord> records;
  for (std::size_t e = 0; e < res.reward_curve.size(); ++e) {
    MetricsRecord r;
    r.episode = static_cast<int>(e);
    r.baseline = "adapt";
    r.seed = seed;
    r.mean_reward = res.reward_curve[e];
    r.avg_ee = res.ee_curve[e];
    r.avg_sum_rate = res.sum_rate_curve[e];
    records.push_back(r);
    sink.write(r);
  }
  const std::string ckpt =
      (std::filesystem::path(cfg.out_dir) / "adapted_checkpoint.bin").string();
  save_checkpoint(ckpt, agents_to_checkpoint(res.sac, res.td3));
  if (!records.empty()) {
    std::cout << "adapted for " << records.size() << " episodes, final-window mean EE "
              << final_window_mean_ee(records) << " bits/Hz/J\n";
  }
  std::cout << "checkpoint: " << ckpt << "\n";
  return 0;
}

int run_eval(const CommonOpts& opts, const std::string& checkpoint_path, int episodes) {
  ExperimentConfig cfg = resolve_config(opts);
  const std::uint64_t seed = cfg.seeds.empty() ? 1 : cfg.seeds.front();

  EnvConfig env_cfg = cfg.env;
  env_cfg.variant = variant_for(cfg.baseline);
  env_cfg.seed = seed;
  env_cfg.finalize();
  Environment env(env_cfg);
  RngStream init(seed);
  SacDiscreteAgent sac(env.state_dim(), env.mask_dim(), cfg.agent.sac, init);
  Td3Agent td3(env.state_dim(), env.cont_action_dim(), cfg.agent.td3, init);
  agents_from_checkpoint(load_checkpoint(checkpoint_path), sac, td3);

  RngStream rng(seed);
  double reward = 0.0, ee = 0.0, rate = 0.0;
  for (int e = 0; e < episodes; ++e) {
    const EpisodeMetrics m = msat_eval_episode(env, sac, td3, rng);
    reward += m.mean_reward;
    ee += m.mean_ee;
    rate += m.mean_sum_rate;
  }
  std::cout << "eval over " << episodes << " episodes: mean reward " << reward / episodes
            << ", mean EE " << ee / episodes << " bits/Hz/J, mean sum rate "
            << rate / episodes << " bps/Hz\n";
  return 0;
}

int run_sweep(const CommonOpts& opts) {
  const ExperimentConfig cfg = resolve_config(opts);
  const auto rows = sweep(cfg);
  std::cout << "axis=" << to_string(cfg.sweep.axis) << " baseline="
            << to_string(cfg.baseline) << "\n";
  for (const auto& row : rows) {
    std::cout << "  value " << row.axis_value << ": mean EE " << row.mean_ee << " +- "
              << row.std_ee << " over " << row.n_seeds << " seeds\n";
  }
  std::cout << "plot data in " << cfg.out_dir << "\n";
  return 0;
}

int run_plot_data(const std::vector<std::string>& metric_files, const std::string& out_dir) {
  std::vector<MetricsRecord> records;
  for (const auto& path : metric_files) {
    const auto batch = read_metrics_jsonl(path);
    records.insert(records.end(), batch.begin(), batch.end());
  }
  emit_plot_data(records, out_dir);
  std::cout << "wrote " << (std::filesystem::path(out_dir) / "convergence.csv").string()
            << " (" << records.size() << " rows)\n";
  return 0;
}

int run_complexity(const CommonOpts& opts) {
  const ExperimentConfig cfg = resolve_config(opts);
  const ComplexityEstimate est = complexity_estimate(cfg);
  std::cout << "meta_training_cost " << est.meta_training_cost << "\n"
            << "meta_adaptation_cost " << est.meta_adaptation_cost << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RSMA aerial active-RIS downlink simulator and MSAT/MMSAT agents"};
  app.require_subcommand(1);

  CommonOpts train_opts, meta_opts, adapt_opts, eval_opts, sweep_opts, cx_opts;
  std::string adapt_ckpt, eval_ckpt;
  int adapt_episodes = 0;
  int eval_episodes = 5;
  std::vector<std::string> metric_files;
  std::string plot_out = "plots";

  auto* train = app.add_subcommand("train", "train the MSAT agent on one task");
  add_common(train, train_opts);

  auto* meta = app.add_subcommand("meta-train", "meta-train the MMSAT agent across tasks");
  add_common(meta, meta_opts);

  auto* adapt = app.add_subcommand("adapt", "adapt a meta-trained model to a fresh task");
  add_common(adapt, adapt_opts);
  adapt->add_option("--checkpoint", adapt_ckpt, "meta-trained checkpoint")->required();
  adapt->add_option("--episodes", adapt_episodes, "adaptation episodes (0 = config value)");

  auto* eval = app.add_subcommand("eval", "greedy evaluation of a checkpoint");
  add_common(eval, eval_opts);
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint to evaluate")->required();
  eval->add_option("--episodes", eval_episodes, "evaluation episodes");

  auto* sw = app.add_subcommand("sweep", "train across a parameter axis");
  add_common(sw, sweep_opts);

  auto* plot = app.add_subcommand("plot-data", "aggregate metrics files into plot CSVs");
  plot->add_option("--metrics", metric_files, "metrics.jsonl files")->required();
  plot->add_option("--out", plot_out, "output directory");

  auto* cx = app.add_subcommand("complexity", "print abstract training cost estimates");
  add_common(cx, cx_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return run_training(train_opts, false);
    if (meta->parsed()) return run_training(meta_opts, true);
    if (adapt->parsed()) return run_adapt(adapt_opts, adapt_ckpt, adapt_episodes);
    if (eval->parsed()) return run_eval(eval_opts, eval_ckpt, eval_episodes);
    if (sw->parsed()) return run_sweep(sweep_opts);
    if (plot->parsed()) return run_plot_data(metric_files, plot_out);
    if (cx->parsed()) return run_complexity(cx_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
