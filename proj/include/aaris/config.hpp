// SPDX-License-Identifier: Apache-2.0
//
// Layered key-value configuration: `section.key = value` lines, `#`/`;`
// comments, and `include <path>` support (later keys override earlier
// ones). Power-like fields accept unit suffixes ("25 dBm", "5 mW",
// "0.5 W"); gain-like fields accept "x dB".

#ifndef AARIS_CONFIG_HPP
#define AARIS_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aaris/meta.hpp"

namespace aaris {

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  long get_int(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<std::uint64_t> get_u64_list(const std::string& key,
                                          const std::vector<std::uint64_t>& fallback) const;

  /// Bare numbers are watts; "dBm", "mW" and "W" suffixes convert.
  double get_watts(const std::string& key, double fallback_watts) const;
  /// Bare numbers are linear amplitude; "dB" converts via 10^(x/20).
  double get_amplitude(const std::string& key, double fallback_linear) const;
  /// Bare numbers are linear power ratios; "dB" converts via 10^(x/10).
  double get_power_ratio(const std::string& key, double fallback_linear) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  void parse_stream(std::istream& in, const std::string& dir);
  std::map<std::string, std::string> values_;
};

/// Power conversion helpers on raw strings (exposed for tests).
double parse_watts(const std::string& text);
double parse_amplitude(const std::string& text);
double parse_power_ratio(const std::string& text);

enum class Baseline { mmsat, msat, passive_ris, fixed_ris };

Baseline baseline_from_string(const std::string& name);
const char* to_string(Baseline b);

enum class SweepAxis { none, ris_elements, bs_power_dbm, bs_antennas, qos };

SweepAxis sweep_axis_from_string(const std::string& name);
const char* to_string(SweepAxis a);

struct AgentHyper {
  SacConfig sac;
  Td3Config td3;
  std::size_t batch = 256;
  std::size_t buffer_capacity = 100000;
  int episodes = 200;
  std::size_t warmup_steps = 0;  // uniform-random behaviour until this fill
};

struct SweepSpec {
  SweepAxis axis = SweepAxis::none;
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string scenario = "default";
  EnvConfig env;
  AgentHyper agent;
  MetaConfig meta;
  Baseline baseline = Baseline::msat;
  SweepSpec sweep;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::string out_dir = "runs/out";
  bool allow_nonstandard_sizes = false;
  bool desk_scale = false;
};

/// All simulation-table defaults, full scale (K=3, M=16, N_BS=5, L=400).
ExperimentConfig default_experiment();

/// Small preset for laptop-speed runs: K=2, M=4, N_BS=2, L=50, E=200,
/// 2x64 networks, batch 64. Implies allow_nonstandard_sizes.
void apply_desk_scale(ExperimentConfig& cfg);

ExperimentConfig experiment_from_kv(const KeyValueConfig& kv);
ExperimentConfig load_config(const std::string& path);

/// Rejects element counts / antenna counts outside the documented sets
/// unless allow_nonstandard_sizes is set. Throws std::invalid_argument
/// naming the offending field.
void validate_experiment(const ExperimentConfig& cfg);

}  // namespace aaris

#endif  // AARIS_CONFIG_HPP
