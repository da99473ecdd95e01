// SPDX-License-Identifier: Apache-2.0
#include "aaris/harness.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace aaris;

namespace {

ExperimentConfig tiny_experiment() {
  ExperimentConfig cfg = default_experiment();
  apply_desk_scale(cfg);
  cfg.env.horizon_slots = 5;
  cfg.agent.episodes = 3;
  cfg.agent.batch = 8;
  cfg.agent.buffer_capacity = 256;
  cfg.agent.sac.hidden = {8};
  cfg.agent.td3.hidden = {8};
  cfg.meta.n_tasks = 2;
  cfg.meta.batch = 8;
  cfg.meta.buffer_capacity = 256;
  cfg.env.finalize();
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("aaris_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("key-value parsing, layering and includes") {
  const auto kv = KeyValueConfig::from_string(
      "# comment\n"
      "scenario = demo ; trailing comment\n"
      "env.k_users = 3\n"
      "env.k_users = 4\n"  // later wins
      "agent.hidden = 16, 32\n"
      "harness.desk_scale = true\n");
  CHECK(kv.get_string("scenario", "") == "demo");
  CHECK(kv.get_int("env.k_users", 0) == 4);
  CHECK(kv.get_int_list("agent.hidden", {}) == std::vector<int>{16, 32});
  CHECK(kv.get_bool("harness.desk_scale", false));
  CHECK(kv.get_int("missing", 7) == 7);

  const auto dir = temp_dir("includes");
  {
    std::ofstream base(dir / "base.cfg");
    base << "env.qos = 1.5\nbs.p_max = 20 dBm\n";
    std::ofstream top(dir / "top.cfg");
    top << "include base.cfg\nenv.qos = 2.5\n";
  }
  const auto layered = KeyValueConfig::from_file((dir / "top.cfg").string());
  CHECK(layered.get_double("env.qos", 0.0) == 2.5);  // include first, then override
  CHECK(layered.get_watts("bs.p_max", 0.0) == doctest::Approx(dbm_to_watt(20.0)));

  CHECK_THROWS_AS(KeyValueConfig::from_string("no equals sign"), std::invalid_argument);
  CHECK_THROWS_AS(KeyValueConfig::from_file("/nonexistent/path.cfg"), std::invalid_argument);
}

TEST_CASE("unit-suffix parsing") {
  CHECK(parse_watts("-10 dBm") == doctest::Approx(1e-4));
  CHECK(parse_watts("5 mW") == doctest::Approx(5e-3));
  CHECK(parse_watts("0.5 W") == doctest::Approx(0.5));
  CHECK(parse_watts("2.5") == doctest::Approx(2.5));
  CHECK(parse_amplitude("20 dB") == doctest::Approx(10.0));
  CHECK(parse_amplitude("3.5") == doctest::Approx(3.5));
  CHECK(parse_power_ratio("3 dB") == doctest::Approx(1.9952623149688795));
  CHECK_THROWS_AS(parse_watts("5 volts"), std::invalid_argument);
  CHECK_THROWS_AS(parse_watts("dBm"), std::invalid_argument);
}

TEST_CASE("empty config yields the full table defaults") {
  const ExperimentConfig cfg = experiment_from_kv(KeyValueConfig::from_string(""));
  CHECK(cfg.env.v_max == doctest::Approx(10.0));
  CHECK(cfg.env.a_max_uav == doctest::Approx(6.0));
  CHECK(cfg.env.k_users == 3);
  CHECK(cfg.env.channel.m() == 16);
  CHECK(cfg.env.channel.n_bs == 5);
  CHECK(cfg.env.horizon_slots == 400);  // T = 40 s at tau = 0.1 s
  CHECK(cfg.env.uav_power.p_b == doctest::Approx(79.85));
  CHECK(cfg.env.uav_power.p_i == doctest::Approx(88.63));
  CHECK(cfg.env.ris_power.p_c == doctest::Approx(1e-4));           // -10 dBm
  CHECK(cfg.env.ris_power.p_dc == doctest::Approx(dbm_to_watt(-5.0)));
  CHECK(cfg.env.ris_power.nu == doctest::Approx(1.25));
  CHECK(cfg.env.bs_power.p_max == doctest::Approx(dbm_to_watt(25.0)));
  CHECK(cfg.env.bs_power.pa_eff == doctest::Approx(0.8));
  CHECK(cfg.env.sigma_k2 == doctest::Approx(1e-11));  // -80 dBm
  CHECK(cfg.env.a_max_ris == doctest::Approx(10.0));  // 20 dB amplitude
  CHECK(cfg.env.qos(0) == doctest::Approx(2.0));
  CHECK(cfg.env.channel.k_bs_u == doctest::Approx(db_to_linear(3.0)));
}

TEST_CASE("config with dBm fields converts at load time") {
  const auto kv = KeyValueConfig::from_string(
      "ris.p_c = -10 dBm\n"
      "bs.p_max = 25 dBm\n"
      "noise.sigma_z2 = -80 dBm\n"
      "ris.a_max = 20 dB\n");
  const ExperimentConfig cfg = experiment_from_kv(kv);
  CHECK(cfg.env.ris_power.p_c == doctest::Approx(1e-4));
  CHECK(cfg.env.bs_power.p_max == doctest::Approx(0.31622776601683794));
  CHECK(cfg.env.sigma_z2 == doctest::Approx(1e-11));
  CHECK(cfg.env.a_max_ris == doctest::Approx(10.0));
}

TEST_CASE("element counts outside the documented sets are rejected") {
  CHECK_THROWS_AS(
      experiment_from_kv(KeyValueConfig::from_string("channel.mx = 5\nchannel.my = 2\n")),
      std::invalid_argument);
  CHECK_NOTHROW(experiment_from_kv(KeyValueConfig::from_string(
      "channel.mx = 5\nchannel.my = 2\nharness.allow_nonstandard_sizes = true\n")));
  CHECK_THROWS_AS(experiment_from_kv(KeyValueConfig::from_string("channel.n_bs = 4\n")),
                  std::invalid_argument);
  // 5x5 = 25 is in the documented set
  CHECK_NOTHROW(
      experiment_from_kv(KeyValueConfig::from_string("channel.mx = 5\nchannel.my = 5\n")));
  CHECK_THROWS_AS(
      experiment_from_kv(KeyValueConfig::from_string(
          "harness.sweep_axis = ris_elements\nharness.sweep_values = 9, 10\n")),
      std::invalid_argument);
}

TEST_CASE("baseline and axis names") {
  CHECK(baseline_from_string("mmsat") == Baseline::mmsat);
  CHECK(baseline_from_string("passive_ris") == Baseline::passive_ris);
  CHECK_THROWS_AS(baseline_from_string("noma"), std::invalid_argument);
  CHECK(sweep_axis_from_string("ris_elements") == SweepAxis::ris_elements);
  CHECK(sweep_axis_from_string("none") == SweepAxis::none);
  CHECK(variant_for(Baseline::passive_ris) == RisVariant::aerial_passive);
  CHECK(variant_for(Baseline::fixed_ris) == RisVariant::fixed_active);
  CHECK(variant_for(Baseline::mmsat) == RisVariant::aerial_active);
}

TEST_CASE("complexity products") {
  CHECK(complexity_product({4, 8, 2}, 10, 2, 3, 5) == 14400ULL);
  CHECK(complexity_product({4, 8, 2}, 10, 2, 3, 1) == 2880ULL);
  CHECK(complexity_product({4, 8, 2}, 10, 4, 3, 5) == 2ULL * 14400ULL);

  ExperimentConfig cfg = tiny_experiment();
  cfg.agent.td3.hidden = {8};
  cfg.meta.batch = 10;
  cfg.meta.episodes_train = 2;
  cfg.meta.episodes_adapt = 7;
  cfg.meta.n_tasks = 5;
  cfg.env.horizon_slots = 3;
  const int s = cfg.env.state_dim();
  const int d = cfg.env.cont_action_dim();
  const ComplexityEstimate est = complexity_estimate(cfg);
  const unsigned long long wsum =
      static_cast<unsigned long long>(s) * 8ULL + 8ULL * static_cast<unsigned long long>(d);
  CHECK(est.meta_training_cost == wsum * 10ULL * 2ULL * 3ULL * 5ULL);
  CHECK(est.meta_adaptation_cost == wsum * 10ULL * 7ULL * 3ULL);
}

TEST_CASE("plot data schema and byte-identical re-emission") {
  std::vector<MetricsRecord> records;
  for (const char* baseline : {"mmsat", "msat", "passive_ris"}) {
    for (int e = 0; e < 4; ++e) {
      MetricsRecord r;
      r.episode = e;
      r.baseline = baseline;
      r.seed = 1;
      r.mean_reward = 0.1 * e;
      r.avg_ee = 0.01 * e;
      r.avg_sum_rate = 1.0 + e;
      records.push_back(r);
    }
  }
  const auto dir = temp_dir("plotdata");
  emit_plot_data(records, dir.string());
  const std::string first = read_file((dir / "convergence.csv").string());
  const auto lines = std::count(first.begin(), first.end(), '\n');
  CHECK(lines == 1 + 3 * 4);  // header + rows
  CHECK(first.rfind("episode,baseline,seed,mean_reward,avg_ee,avg_sum_rate\n", 0) == 0);

  emit_plot_data(records, dir.string());
  CHECK(read_file((dir / "convergence.csv").string()) == first);

  CHECK_THROWS_AS(emit_plot_data({}, dir.string()), std::invalid_argument);
}

TEST_CASE("metrics jsonl round trip") {
  const auto dir = temp_dir("jsonl");
  const std::string path = (dir / "metrics.jsonl").string();
  MetricsRecord r;
  r.episode = 3;
  r.baseline = "msat";
  r.seed = 42;
  r.mean_reward = -0.25;
  r.avg_ee = 0.011;
  r.avg_sum_rate = 3.5;
  r.violations[2] = 7;
  r.wall_clock_s = 123.0;  // must not appear in the file
  {
    JsonlSink sink(path);
    sink.write(r);
  }
  const std::string text = read_file(path);
  CHECK(text.find("wall") == std::string::npos);
  const auto back = read_metrics_jsonl(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].episode == 3);
  CHECK(back[0].baseline == "msat");
  CHECK(back[0].seed == 42);
  CHECK(back[0].mean_reward == -0.25);
  CHECK(back[0].violations[2] == 7);
}

TEST_CASE("task generation is deterministic and the held-out task is fresh") {
  const ExperimentConfig cfg = tiny_experiment();
  const auto t1 = make_tasks(cfg, 3);
  const auto t2 = make_tasks(cfg, 3);
  REQUIRE(t1.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(t1[i].user_init == t2[i].user_init);
    for (const auto& u : t1[i].user_init) {
      CHECK(u.x() >= cfg.env.q_min.x());
      CHECK(u.x() <= cfg.env.q_max.x());
    }
  }
  const TaskSpec held = held_out_task(cfg);
  for (const auto& t : make_tasks(cfg, cfg.meta.n_tasks)) {
    CHECK(held.user_init != t.user_init);
  }
}

TEST_CASE("episode record EE equals the mean of per-slot summands") {
  ExperimentConfig cfg = tiny_experiment();
  EnvConfig env_cfg = cfg.env;
  env_cfg.seed = 9;
  Environment env(env_cfg);
  RngStream rng(9);
  RngStream init = rng.derive(1);
  SacDiscreteAgent sac(env.state_dim(), env.mask_dim(), cfg.agent.sac, init);
  Td3Agent td3(env.state_dim(), env.cont_action_dim(), cfg.agent.td3, init);
  ReplayBuffer buf(cfg.agent.buffer_capacity);

  std::vector<SlotMetrics> detail;
  const EpisodeMetrics m =
      msat_train_episode(env, sac, td3, buf, cfg.agent.batch, rng, nullptr, &detail);
  REQUIRE(detail.size() == static_cast<std::size_t>(env_cfg.horizon_slots));
  double acc = 0.0;
  for (const auto& slot : detail) acc += slot.ee;
  CHECK(m.mean_ee == doctest::Approx(acc / detail.size()).epsilon(1e-9));
}

TEST_CASE("run_baseline streams records and reproduces files byte-for-byte") {
  ExperimentConfig cfg = tiny_experiment();
  const auto dir = temp_dir("determinism");

  auto run_once = [&](const std::string& name) {
    JsonlSink sink((dir / name).string());
    const RunResult res = run_baseline(cfg, Baseline::msat, 7, &sink);
    CHECK(res.records.size() == static_cast<std::size_t>(cfg.agent.episodes));
    return read_file((dir / name).string());
  };
  const std::string a = run_once("a.jsonl");
  const std::string b = run_once("b.jsonl");
  CHECK(a == b);
  CHECK(a.find("\"baseline\":\"msat\"") != std::string::npos);
}

TEST_CASE("meta baseline produces per-episode records") {
  ExperimentConfig cfg = tiny_experiment();
  cfg.agent.episodes = 2;
  const RunResult res = run_baseline(cfg, Baseline::passive_ris, 3);
  CHECK(res.records.size() == 2);
  CHECK(res.records[0].baseline == "passive_ris");
  CHECK(res.checkpoint.count("td3.actor") == 1);
}

TEST_CASE("passive total power sits below the active variant for matched policies") {
  ExperimentConfig cfg = tiny_experiment();
  EnvConfig active_cfg = cfg.env;
  EnvConfig passive_cfg = cfg.env;
  passive_cfg.variant = RisVariant::aerial_passive;
  passive_cfg.finalize();

  Environment active(active_cfg);
  Environment passive(passive_cfg);
  active.reset();
  passive.reset();

  RngStream rng_a(5), rng_p(5);
  double p_active = 0.0, p_passive = 0.0;
  for (int l = 0; l < active_cfg.horizon_slots; ++l) {
    JointAction aa = JointAction::zeros(active_cfg);
    for (auto& bit : aa.sel_mask) bit = rng_a.uniform() < 0.5 ? 1 : 0;
    for (Eigen::Index i = 0; i < aa.raw_cont.size(); ++i) aa.raw_cont(i) = rng_a.uniform(-1, 1);
    p_active += active.step(aa).metrics.p_total;

    JointAction ap = JointAction::zeros(passive_cfg);
    for (auto& bit : ap.sel_mask) bit = rng_p.uniform() < 0.5 ? 1 : 0;
    for (Eigen::Index i = 0; i < ap.raw_cont.size(); ++i) ap.raw_cont(i) = rng_p.uniform(-1, 1);
    p_passive += passive.step(ap).metrics.p_total;
  }
  CHECK(p_passive < p_active);
}

TEST_CASE("final window mean uses the last tenth of the records") {
  std::vector<MetricsRecord> records(20);
  for (int i = 0; i < 20; ++i) {
    records[static_cast<std::size_t>(i)].avg_ee = i;
  }
  // last 10% of 20 records = last 2: (18 + 19)/2
  CHECK(final_window_mean_ee(records) == doctest::Approx(18.5));
  records.resize(5);  // window clamps to one record
  CHECK(final_window_mean_ee(records) == doctest::Approx(4.0));
}

TEST_CASE("sweep point configs apply the axis") {
  ExperimentConfig cfg = tiny_experiment();
  const ExperimentConfig m9 = apply_sweep_value(cfg, SweepAxis::ris_elements, 9);
  CHECK(m9.env.channel.mx == 3);
  CHECK(m9.env.channel.my == 3);
  const ExperimentConfig p30 = apply_sweep_value(cfg, SweepAxis::bs_power_dbm, 30);
  CHECK(p30.env.bs_power.p_max == doctest::Approx(1.0));
  const ExperimentConfig n3 = apply_sweep_value(cfg, SweepAxis::bs_antennas, 3);
  CHECK(n3.env.channel.n_bs == 3);
  const ExperimentConfig q4 = apply_sweep_value(cfg, SweepAxis::qos, 4.0);
  CHECK(q4.env.qos(0) == doctest::Approx(4.0));
}

TEST_CASE("sweep trains every point and writes the summary") {
  ExperimentConfig cfg = tiny_experiment();
  cfg.agent.episodes = 2;
  cfg.env.horizon_slots = 4;
  cfg.sweep.axis = SweepAxis::ris_elements;
  cfg.sweep.values = {4, 9};
  cfg.seeds = {1, 2, 3};
  const auto dir = temp_dir("sweep");
  cfg.out_dir = dir.string();

  std::vector<SweepPointResult> raw;
  const auto rows = sweep(cfg, &raw);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].axis_value == 4);
  CHECK(rows[1].axis_value == 9);
  CHECK(rows[0].n_seeds == 3);
  CHECK(raw.size() == 6);
  CHECK(std::filesystem::exists(dir / "sweep_ris_elements.csv"));
  const std::string csv = read_file((dir / "sweep_ris_elements.csv").string());
  CHECK(csv.rfind("axis,value,baseline,mean_ee,std_ee,n_seeds\n", 0) == 0);

  ExperimentConfig bad = cfg;
  bad.seeds = {1};
  CHECK_THROWS_AS(sweep(bad, nullptr), std::invalid_argument);
}
