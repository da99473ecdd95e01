// SPDX-License-Identifier: Apache-2.0
#include "aaris/config.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aaris {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config: field '" + key + "' is not a number: '" + text + "'");
}

// Splits "<number> <unit>" and returns {number, lowercase unit ("" if none)}.
std::pair<double, std::string> parse_with_unit(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: field '" + key + "' is not a number: '" + text + "'");
  }
  return {v, lower(trim(text.substr(used)))};
}

}  // namespace

double parse_watts(const std::string& text) {
  const auto [v, unit] = parse_with_unit(text, "watts");
  if (unit.empty() || unit == "w" || unit == "watt" || unit == "watts") return v;
  if (unit == "mw" || unit == "mwatt") return v * 1e-3;
  if (unit == "dbm") return dbm_to_watt(v);
  throw std::invalid_argument("config: unknown power unit '" + unit + "'");
}

double parse_amplitude(const std::string& text) {
  const auto [v, unit] = parse_with_unit(text, "amplitude");
  if (unit.empty()) return v;
  if (unit == "db") return db_to_amplitude(v);
  throw std::invalid_argument("config: unknown amplitude unit '" + unit + "'");
}

double parse_power_ratio(const std::string& text) {
  const auto [v, unit] = parse_with_unit(text, "power ratio");
  if (unit.empty()) return v;
  if (unit == "db") return db_to_linear(v);
  throw std::invalid_argument("config: unknown ratio unit '" + unit + "'");
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open file '" + path + "'");
  KeyValueConfig kv;
  kv.parse_stream(in, std::filesystem::path(path).parent_path().string());
  return kv;
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
  std::stringstream ss(text);
  KeyValueConfig kv;
  kv.parse_stream(ss, ".");
  return kv;
}

void KeyValueConfig::parse_stream(std::istream& in, const std::string& dir) {
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.rfind("include", 0) == 0 && line.size() > 8 &&
        std::isspace(static_cast<unsigned char>(line[7]))) {
      std::filesystem::path inc(trim(line.substr(8)));
      if (inc.is_relative() && !dir.empty()) inc = std::filesystem::path(dir) / inc;
      std::ifstream sub(inc);
      if (!sub) throw std::invalid_argument("config: cannot open include '" + inc.string() + "'");
      parse_stream(sub, inc.parent_path().string());
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: malformed line '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config: empty key in line '" + line + "'");
    values_[key] = value;
  }
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string v = lower(it->second);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config: field '" + key + "' is not a boolean: '" + it->second + "'");
}

long KeyValueConfig::get_int(const std::string& key, long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const double v = parse_number(it->second, key);
  const long i = static_cast<long>(v);
  if (static_cast<double>(i) != v)
    throw std::invalid_argument("config: field '" + key + "' is not an integer");
  return i;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return parse_number(it->second, key);
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(it->second)) out.push_back(parse_number(item, key));
  return out;
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& key,
                                              const std::vector<int>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  for (double v : get_double_list(key, {})) out.push_back(static_cast<int>(v));
  return out;
}

std::vector<std::uint64_t> KeyValueConfig::get_u64_list(
    const std::string& key, const std::vector<std::uint64_t>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(it->second))
    out.push_back(static_cast<std::uint64_t>(std::stoull(item)));
  return out;
}

double KeyValueConfig::get_watts(const std::string& key, double fallback_watts) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback_watts : parse_watts(it->second);
}

double KeyValueConfig::get_amplitude(const std::string& key, double fallback_linear) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback_linear : parse_amplitude(it->second);
}

double KeyValueConfig::get_power_ratio(const std::string& key, double fallback_linear) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback_linear : parse_power_ratio(it->second);
}

Baseline baseline_from_string(const std::string& name) {
  const std::string v = lower(name);
  if (v == "mmsat") return Baseline::mmsat;
  if (v == "msat") return Baseline::msat;
  if (v == "passive_ris") return Baseline::passive_ris;
  if (v == "fixed_ris") return Baseline::fixed_ris;
  throw std::invalid_argument("config: unknown baseline '" + name + "'");
}

const char* to_string(Baseline b) {
  switch (b) {
    case Baseline::mmsat: return "mmsat";
    case Baseline::msat: return "msat";
    case Baseline::passive_ris: return "passive_ris";
    case Baseline::fixed_ris: return "fixed_ris";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  const std::string v = lower(name);
  if (v == "none" || v.empty()) return SweepAxis::none;
  if (v == "ris_elements" || v == "m") return SweepAxis::ris_elements;
  if (v == "bs_power_dbm" || v == "p_max_bs") return SweepAxis::bs_power_dbm;
  if (v == "bs_antennas" || v == "n_bs") return SweepAxis::bs_antennas;
  if (v == "qos") return SweepAxis::qos;
  throw std::invalid_argument("config: unknown sweep axis '" + name + "'");
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::none: return "none";
    case SweepAxis::ris_elements: return "ris_elements";
    case SweepAxis::bs_power_dbm: return "bs_power_dbm";
    case SweepAxis::bs_antennas: return "bs_antennas";
    case SweepAxis::qos: return "qos";
  }
  return "unknown";
}

ExperimentConfig default_experiment() {
  ExperimentConfig cfg;
  cfg.env.finalize();
  return cfg;
}

void apply_desk_scale(ExperimentConfig& cfg) {
  cfg.env.k_users = 2;
  cfg.env.channel.mx = 2;
  cfg.env.channel.my = 2;
  cfg.env.channel.n_bs = 2;
  cfg.env.horizon_slots = 50;
  cfg.env.qos = VectorXd();  // refill for the new user count
  // Shrunk geometry and quieter receivers keep the full-scale QoS target
  // reachable at the table transmit power on short links.
  cfg.env.q_min = Vector3d(0.0, 0.0, 20.0);
  cfg.env.q_max = Vector3d(30.0, 30.0, 20.0);
  cfg.env.uav_init = Vector3d(15.0, 15.0, 20.0);
  cfg.env.fixed_ris_pos = Vector3d(15.0, 15.0, 20.0);
  cfg.env.bs_pos = Vector3d(0.0, 0.0, 10.0);
  cfg.env.sigma_z2 = 1e-13;  // -100 dBm
  cfg.env.sigma_k2 = 1e-13;
  // Scaled-down service targets so the feasible set has real volume at the
  // desk link budget: no QoS floor, small common-rate ceiling.
  cfg.env.qos = VectorXd::Constant(2, 0.0);
  cfg.env.c_max = 0.02;
  cfg.env.a_max_uav = 12.0;
  cfg.agent.td3.explore_std = 0.1;
  cfg.agent.td3.lr_actor = 1e-4;
  cfg.agent.td3.preact_reg = 1e-3;
  cfg.agent.td3.lr_critic1 = 1e-3;
  cfg.agent.td3.lr_critic2 = 1e-3;
  cfg.agent.sac.lr_critic1 = 1e-3;
  cfg.agent.sac.lr_critic2 = 1e-3;
  cfg.agent.sac.reward_scale = 0.002;
  cfg.agent.td3.reward_scale = 0.002;
  cfg.agent.sac.gamma = 0.9;
  cfg.agent.td3.gamma = 0.9;
  cfg.agent.warmup_steps = 2000;
  cfg.agent.episodes = 200;
  cfg.agent.batch = 64;
  cfg.agent.buffer_capacity = 20000;
  cfg.agent.sac.hidden = {64, 64};
  cfg.agent.td3.hidden = {64, 64};
  cfg.meta.batch = 64;
  cfg.meta.buffer_capacity = 20000;
  cfg.meta.warmup_steps = 2000;
  cfg.desk_scale = true;
  cfg.allow_nonstandard_sizes = true;
  cfg.env.finalize();
}

ExperimentConfig experiment_from_kv(const KeyValueConfig& kv) {
  ExperimentConfig cfg;
  cfg.scenario = kv.get_string("scenario", cfg.scenario);

  if (kv.get_bool("harness.desk_scale", false)) apply_desk_scale(cfg);
  cfg.allow_nonstandard_sizes =
      kv.get_bool("harness.allow_nonstandard_sizes", cfg.allow_nonstandard_sizes);
  cfg.baseline = baseline_from_string(kv.get_string("harness.baseline", to_string(cfg.baseline)));
  cfg.out_dir = kv.get_string("harness.out_dir", cfg.out_dir);
  cfg.seeds = kv.get_u64_list("harness.seeds", cfg.seeds);
  cfg.agent.episodes = static_cast<int>(kv.get_int("harness.episodes", cfg.agent.episodes));
  cfg.sweep.axis = sweep_axis_from_string(kv.get_string("harness.sweep_axis", "none"));
  cfg.sweep.values = kv.get_double_list("harness.sweep_values", {});

  EnvConfig& env = cfg.env;
  env.k_users = static_cast<int>(kv.get_int("env.k_users", env.k_users));
  env.horizon_slots = static_cast<int>(kv.get_int("env.horizon_slots", env.horizon_slots));
  env.slot_dt = kv.get_double("env.slot_dt", env.slot_dt);
  env.v_max = kv.get_double("env.v_max", env.v_max);
  env.a_max_uav = kv.get_double("env.a_max_uav", env.a_max_uav);
  env.c_max = kv.get_double("env.c_max", env.c_max);
  env.user_step_std = kv.get_double("env.user_step_std", env.user_step_std);
  env.seed = static_cast<std::uint64_t>(kv.get_int("env.seed", static_cast<long>(env.seed)));
  env.q_max.x() = kv.get_double("env.arena_max_x", env.q_max.x());
  env.q_max.y() = kv.get_double("env.arena_max_y", env.q_max.y());
  env.q_min.x() = kv.get_double("env.arena_min_x", env.q_min.x());
  env.q_min.y() = kv.get_double("env.arena_min_y", env.q_min.y());
  const double altitude = kv.get_double("env.altitude", env.q_max.z());
  env.q_min.z() = altitude;
  env.q_max.z() = altitude;
  env.uav_init.x() = kv.get_double("env.uav_init_x", env.uav_init.x());
  env.uav_init.y() = kv.get_double("env.uav_init_y", env.uav_init.y());
  env.uav_init.z() = altitude;
  env.fixed_ris_pos.z() = altitude;
  env.bs_pos.x() = kv.get_double("env.bs_x", env.bs_pos.x());
  env.bs_pos.y() = kv.get_double("env.bs_y", env.bs_pos.y());
  env.bs_pos.z() = kv.get_double("env.bs_z", env.bs_pos.z());
  const double qos = kv.get_double("env.qos", 2.0);
  env.qos = VectorXd::Constant(env.k_users, qos);

  ChannelParams& ch = env.channel;
  ch.mx = static_cast<int>(kv.get_int("channel.mx", ch.mx));
  ch.my = static_cast<int>(kv.get_int("channel.my", ch.my));
  ch.n_bs = static_cast<int>(kv.get_int("channel.n_bs", ch.n_bs));
  ch.c0 = kv.get_double("channel.c0", ch.c0);
  ch.d0 = kv.get_double("channel.d0", ch.d0);
  ch.alpha_bs_u = kv.get_double("channel.alpha_bs_u", ch.alpha_bs_u);
  ch.alpha_u_k = kv.get_double("channel.alpha_u_k", ch.alpha_u_k);
  ch.k_bs_u = kv.get_power_ratio("channel.rician_bs_u", ch.k_bs_u);
  ch.k_u_k = kv.get_power_ratio("channel.rician_u_k", ch.k_u_k);
  ch.zeta_phase = kv.get_double("channel.zeta_phase", ch.zeta_phase);
  ch.use_printed_cos_beta = kv.get_bool("channel.use_printed_cos_beta", ch.use_printed_cos_beta);

  env.a_max_ris = kv.get_amplitude("ris.a_max", env.a_max_ris);
  env.ris_power.p_c = kv.get_watts("ris.p_c", env.ris_power.p_c);
  env.ris_power.p_dc = kv.get_watts("ris.p_dc", env.ris_power.p_dc);
  env.ris_power.p_amp_budget = kv.get_watts("ris.p_amp_budget", env.ris_power.p_amp_budget);
  env.ris_power.amp_eff = kv.get_double("ris.eta", env.ris_power.amp_eff);
  env.ris_power.nu = 1.0 / env.ris_power.amp_eff;
  env.ris_static_power_counts_all =
      kv.get_bool("ris.static_power_counts_all", env.ris_static_power_counts_all);

  env.bs_power.p_max = kv.get_watts("bs.p_max", env.bs_power.p_max);
  env.bs_power.pa_eff = kv.get_double("bs.epsilon", env.bs_power.pa_eff);
  env.bs_power.p_cir_bs = kv.get_watts("bs.p_cir_bs", env.bs_power.p_cir_bs);
  env.bs_power.p_cir_user = kv.get_watts("bs.p_cir_user", env.bs_power.p_cir_user);

  UavPowerParams& uav = env.uav_power;
  uav.p_b = kv.get_double("uav.p_b", uav.p_b);
  uav.p_i = kv.get_double("uav.p_i", uav.p_i);
  uav.omega = kv.get_double("uav.omega", uav.omega);
  uav.rotor_r = kv.get_double("uav.rotor_r", uav.rotor_r);
  uav.d_ratio = kv.get_double("uav.d_ratio", uav.d_ratio);
  uav.air_density = kv.get_double("uav.air_density", uav.air_density);
  uav.solidity = kv.get_double("uav.solidity", uav.solidity);
  uav.disk_area = kv.get_double("uav.disk_area", uav.disk_area);
  uav.v_induced = kv.get_double("uav.v_induced", uav.v_induced);
  uav.profile_drag = kv.get_double("uav.profile_drag", uav.profile_drag);
  uav.corr = kv.get_double("uav.corr", uav.corr);
  uav.weight = kv.get_double("uav.weight", uav.weight);

  env.sigma_z2 = kv.get_watts("noise.sigma_z2", env.sigma_z2);
  env.sigma_k2 = kv.get_watts("noise.sigma_k2", env.sigma_k2);
  env.rsma.common_sinr_excludes_self =
      kv.get_bool("rsma.common_sinr_excludes_self", env.rsma.common_sinr_excludes_self);

  AgentHyper& ag = cfg.agent;
  ag.batch = static_cast<std::size_t>(kv.get_int("agent.batch", static_cast<long>(ag.batch)));
  ag.buffer_capacity =
      static_cast<std::size_t>(kv.get_int("agent.buffer", static_cast<long>(ag.buffer_capacity)));
  ag.warmup_steps =
      static_cast<std::size_t>(kv.get_int("agent.warmup", static_cast<long>(ag.warmup_steps)));
  const std::vector<int> hidden = kv.get_int_list("agent.hidden", ag.sac.hidden);
  ag.sac.hidden = hidden;
  ag.td3.hidden = hidden;
  ag.sac.gamma = kv.get_double("agent.gamma", ag.sac.gamma);
  ag.td3.gamma = ag.sac.gamma;
  ag.sac.tau = kv.get_double("agent.tau", ag.sac.tau);
  ag.td3.tau_critic = ag.sac.tau;
  ag.td3.tau_actor = ag.sac.tau;
  const double lr = kv.get_double("agent.lr", ag.sac.lr_actor);
  ag.sac.lr_actor = ag.sac.lr_critic1 = ag.sac.lr_critic2 = lr;
  ag.td3.lr_actor = ag.td3.lr_critic1 = ag.td3.lr_critic2 = lr;
  ag.sac.temperature = kv.get_double("agent.temperature", ag.sac.temperature);
  const double rscale = kv.get_double("agent.reward_scale", ag.sac.reward_scale);
  ag.sac.reward_scale = rscale;
  ag.td3.reward_scale = rscale;
  ag.td3.policy_delay = static_cast<int>(kv.get_int("agent.policy_delay", ag.td3.policy_delay));
  ag.td3.smoothing_std = kv.get_double("agent.smoothing_std", ag.td3.smoothing_std);
  ag.td3.smoothing_clip = kv.get_double("agent.smoothing_clip", ag.td3.smoothing_clip);
  ag.td3.explore_std = kv.get_double("agent.explore_std", ag.td3.explore_std);
  ag.td3.preact_reg = kv.get_double("agent.preact_reg", ag.td3.preact_reg);
  const std::string opt = lower(kv.get_string("agent.optimizer", "adam"));
  if (opt != "adam" && opt != "sgd")
    throw std::invalid_argument("config: agent.optimizer must be adam or sgd");
  ag.sac.optimizer = opt == "adam" ? OptimizerKind::adam : OptimizerKind::sgd;
  ag.td3.optimizer = ag.sac.optimizer;

  MetaConfig& meta = cfg.meta;
  meta.n_tasks = static_cast<int>(kv.get_int("meta.tasks", meta.n_tasks));
  meta.n_inner = static_cast<int>(kv.get_int("meta.n_inner", meta.n_inner));
  meta.beta_meta = kv.get_double("meta.beta", meta.beta_meta);
  meta.episodes_train =
      static_cast<int>(kv.get_int("meta.episodes_train", meta.episodes_train));
  meta.episodes_adapt =
      static_cast<int>(kv.get_int("meta.episodes_adapt", meta.episodes_adapt));
  meta.batch = cfg.agent.batch;
  meta.buffer_capacity = cfg.agent.buffer_capacity;
  meta.warmup_steps = cfg.agent.warmup_steps;

  env.finalize();
  validate_experiment(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return experiment_from_kv(KeyValueConfig::from_file(path));
}

void validate_experiment(const ExperimentConfig& cfg) {
  cfg.env.validate();
  if (cfg.agent.episodes < 1)
    throw std::invalid_argument("config: harness.episodes must be >= 1");
  if (cfg.meta.n_tasks < 1) throw std::invalid_argument("config: meta.tasks must be >= 1");
  if (cfg.meta.n_inner < 0) throw std::invalid_argument("config: meta.n_inner must be >= 0");
  if (cfg.agent.batch < 1) throw std::invalid_argument("config: agent.batch must be >= 1");
  if (!cfg.allow_nonstandard_sizes) {
    auto in_set = [](int v, std::initializer_list<int> set) {
      for (int s : set)
        if (v == s) return true;
      return false;
    };
    if (!in_set(cfg.env.channel.m(), {9, 16, 25, 36}))
      throw std::invalid_argument(
          "config: channel.mx*my outside the documented set {9,16,25,36}; set "
          "harness.allow_nonstandard_sizes to override");
    if (!in_set(cfg.env.channel.n_bs, {3, 5, 7, 11}))
      throw std::invalid_argument(
          "config: channel.n_bs outside the documented set {3,5,7,11}; set "
          "harness.allow_nonstandard_sizes to override");
    if (cfg.sweep.axis == SweepAxis::ris_elements) {
      for (double v : cfg.sweep.values) {
        if (!in_set(static_cast<int>(v), {9, 16, 25, 36}))
          throw std::invalid_argument(
              "config: harness.sweep_values for ris_elements outside {9,16,25,36}; set "
              "harness.allow_nonstandard_sizes to override");
      }
    }
    if (cfg.sweep.axis == SweepAxis::bs_antennas) {
      for (double v : cfg.sweep.values) {
        if (!in_set(static_cast<int>(v), {3, 5, 7, 11}))
          throw std::invalid_argument(
              "config: harness.sweep_values for bs_antennas outside {3,5,7,11}; set "
              "harness.allow_nonstandard_sizes to override");
      }
    }
  }
  if (cfg.sweep.axis != SweepAxis::none && cfg.sweep.values.size() < 2)
    throw std::invalid_argument("config: a sweep needs at least two axis values");
}

}  // namespace aaris
