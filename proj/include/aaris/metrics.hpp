// SPDX-License-Identifier: Apache-2.0
//
// Metric records and their sinks: line-delimited JSON for raw per-episode
// records (deterministic content; timing stays out of the hashed stream)
// and delimited text files for the plot families.

#ifndef AARIS_METRICS_HPP
#define AARIS_METRICS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace aaris {

struct MetricsRecord {
  int episode = 0;
  std::string baseline;
  std::uint64_t seed = 0;
  double mean_reward = 0.0;
  double avg_ee = 0.0;
  double avg_sum_rate = 0.0;
  std::array<long, 13> violations{};
  double wall_clock_s = 0.0;  // informational; not serialized
};

/// One self-describing JSON object, no timing fields, '\n'-terminated.
std::string metrics_record_to_json(const MetricsRecord& record);

/// Append-only JSONL sink; one flushed line per record.
class JsonlSink {
 public:
  explicit JsonlSink(const std::string& path);
  ~JsonlSink();
  JsonlSink(const JsonlSink&) = delete;
  JsonlSink& operator=(const JsonlSink&) = delete;

  void write(const MetricsRecord& record);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  void* file_;  // FILE*; kept opaque to avoid cstdio in the header
};

std::vector<MetricsRecord> read_metrics_jsonl(const std::string& path);

/// Convergence plot family: one CSV with columns
/// episode, baseline, seed, mean_reward, avg_ee, avg_sum_rate,
/// ordered by (baseline, seed, episode). Byte-identical for equal inputs.
void emit_plot_data(const std::vector<MetricsRecord>& records, const std::string& out_dir);

struct SweepRow {
  double axis_value = 0.0;
  std::string baseline;
  double mean_ee = 0.0;
  double std_ee = 0.0;
  int n_seeds = 0;
};

/// Sweep plot family: sweep_<axis>.csv with columns
/// axis, value, baseline, mean_ee, std_ee, n_seeds.
void emit_sweep_data(const std::vector<SweepRow>& rows, const std::string& axis_name,
                     const std::string& out_dir);

/// Stable shortest-roundtrip float formatting used in all emitted files.
std::string format_double(double v);

}  // namespace aaris

#endif  // AARIS_METRICS_HPP
