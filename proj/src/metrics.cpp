// SPDX-License-Identifier: Apache-2.0
#include "aaris/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace aaris {

using nlohmann::json;

std::string format_double(double v) {
  // json's dtoa gives the shortest representation that round-trips.
  return json(v).dump();
}

std::string metrics_record_to_json(const MetricsRecord& record) {
  json j;
  j["episode"] = record.episode;
  j["baseline"] = record.baseline;
  j["seed"] = record.seed;
  j["mean_reward"] = record.mean_reward;
  j["avg_ee"] = record.avg_ee;
  j["avg_sum_rate"] = record.avg_sum_rate;
  j["violations"] = record.violations;
  return j.dump() + "\n";
}

JsonlSink::JsonlSink(const std::string& path) : path_(path) {
  const auto dir = std::filesystem::path(path).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  file_ = std::fopen(path.c_str(), "wb");
  if (file_ == nullptr) throw std::runtime_error("metrics: cannot open " + path);
}

JsonlSink::~JsonlSink() {
  if (file_ != nullptr) std::fclose(static_cast<std::FILE*>(file_));
}

void JsonlSink::write(const MetricsRecord& record) {
  const std::string line = metrics_record_to_json(record);
  auto* f = static_cast<std::FILE*>(file_);
  if (std::fwrite(line.data(), 1, line.size(), f) != line.size())
    throw std::runtime_error("metrics: short write to " + path_);
  std::fflush(f);
}

std::vector<MetricsRecord> read_metrics_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("metrics: cannot open " + path);
  std::vector<MetricsRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    MetricsRecord r;
    r.episode = j.at("episode").get<int>();
    r.baseline = j.at("baseline").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.mean_reward = j.at("mean_reward").get<double>();
    r.avg_ee = j.at("avg_ee").get<double>();
    r.avg_sum_rate = j.at("avg_sum_rate").get<double>();
    const auto& v = j.at("violations");
    for (std::size_t i = 0; i < r.violations.size() && i < v.size(); ++i) {
      r.violations[i] = v[i].get<long>();
    }
    out.push_back(std::move(r));
  }
  return out;
}

void emit_plot_data(const std::vector<MetricsRecord>& records, const std::string& out_dir) {
  if (records.empty()) throw std::invalid_argument("emit_plot_data: no records");
  std::filesystem::create_directories(out_dir);
  std::vector<const MetricsRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const MetricsRecord* a, const MetricsRecord* b) {
    if (a->baseline != b->baseline) return a->baseline < b->baseline;
    if (a->seed != b->seed) return a->seed < b->seed;
    return a->episode < b->episode;
  });
  const auto path = std::filesystem::path(out_dir) / "convergence.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_plot_data: cannot open " + path.string());
  out << "episode,baseline,seed,mean_reward,avg_ee,avg_sum_rate\n";
  for (const auto* r : sorted) {
    out << r->episode << ',' << r->baseline << ',' << r->seed << ','
        << format_double(r->mean_reward) << ',' << format_double(r->avg_ee) << ','
        << format_double(r->avg_sum_rate) << '\n';
  }
}

void emit_sweep_data(const std::vector<SweepRow>& rows, const std::string& axis_name,
                     const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / ("sweep_" + axis_name + ".csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_sweep_data: cannot open " + path.string());
  out << "axis,value,baseline,mean_ee,std_ee,n_seeds\n";
  for (const auto& r : rows) {
    out << axis_name << ',' << format_double(r.axis_value) << ',' << r.baseline << ','
        << format_double(r.mean_ee) << ',' << format_double(r.std_ee) << ',' << r.n_seeds
        << '\n';
  }
}

}  // namespace aaris
