#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "textgraph/metrics.hpp"

namespace textgraph {

/// Results of one model configuration across seeds, plus the run telemetry
/// (wall clock, process peak RSS) that makes the one-hot vs dense feature
/// cost visible.
struct ExperimentReport {
  std::string model;
  nlohmann::json config;
  std::vector<std::uint64_t> seeds;
  std::vector<Metrics> per_seed;  // aligned with seeds
  double runtime_s = 0.0;
  std::int64_t peak_mem_bytes = 0;

  MetricSummary accuracy() const;
  MetricSummary macro_f1() const;
  std::vector<MetricSummary> per_class_f1() const;

  nlohmann::json to_json() const;
  static ExperimentReport from_json(const nlohmann::json& j);
};

/// Thrown when a seed run fails; carries the completed seeds so partial
/// results can still be written.
class RunSeededError : public std::runtime_error {
 public:
  RunSeededError(const std::string& what, ExperimentReport partial)
      : std::runtime_error(what), partial_results(std::move(partial)) {}
  ExperimentReport partial_results;
};

/// Runs `run_one` once per seed (optionally on `jobs` worker threads; runs
/// must be pure functions of their seed) and aggregates mean / population
/// std per metric. Aggregation order is the given seed order regardless of
/// completion order.
ExperimentReport run_seeded(const std::string& model, const nlohmann::json& config,
                            const std::vector<std::uint64_t>& seeds,
                            const std::function<Metrics(std::uint64_t)>& run_one, int jobs = 1);

/// Writes metrics.json (array of reports) and summary.csv
/// (model,metric,mean,std) into `dir`.
void emit_report(const std::vector<ExperimentReport>& reports,
                 const std::filesystem::path& dir);

struct SweepPoint {
  double x = 0.0;
  std::vector<ExperimentReport> reports;
};

/// plotdata_<name>.csv: x,model,macro_f1_mean,macro_f1_std,accuracy_mean,
/// accuracy_std, rows sorted by x then model.
void emit_plotdata(const std::string& name, std::vector<SweepPoint> points,
                   const std::filesystem::path& dir);

/// Process peak resident set size (VmHWM), in bytes; 0 if unavailable.
std::int64_t peak_rss_bytes();

}  // namespace textgraph
