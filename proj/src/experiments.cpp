#include "textgraph/experiments.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace textgraph {

namespace {

std::vector<double> metric_values(const std::vector<Metrics>& per_seed,
                                  const std::function<double(const Metrics&)>& get) {
  std::vector<double> v;
  v.reserve(per_seed.size());
  for (const auto& m : per_seed) v.push_back(get(m));
  return v;
}

nlohmann::json summary_json(const MetricSummary& s) {
  return {{"mean", s.mean}, {"std", s.stddev}, {"per_seed", s.per_seed}};
}

nlohmann::json confusion_json(const Dense<std::int64_t>& c) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < c.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < c.cols(); ++j) row.push_back(c(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Dense<std::int64_t> confusion_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Index>(j.at(0).size()) : 0;
  Dense<std::int64_t> c(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index k = 0; k < cols; ++k) {
      c(i, k) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<std::int64_t>();
    }
  }
  return c;
}

}  // namespace

MetricSummary ExperimentReport::accuracy() const {
  return summarize(metric_values(per_seed, [](const Metrics& m) { return m.accuracy; }));
}

MetricSummary ExperimentReport::macro_f1() const {
  return summarize(metric_values(per_seed, [](const Metrics& m) { return m.macro_f1; }));
}

std::vector<MetricSummary> ExperimentReport::per_class_f1() const {
  std::vector<MetricSummary> out;
  if (per_seed.empty()) return out;
  const std::size_t n_classes = per_seed.front().per_class_f1.size();
  for (std::size_t c = 0; c < n_classes; ++c) {
    out.push_back(summarize(
        metric_values(per_seed, [c](const Metrics& m) { return m.per_class_f1[c]; })));
  }
  return out;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["model"] = model;
  j["config"] = config;
  j["seeds"] = seeds;
  j["accuracy"] = summary_json(accuracy());
  j["macro_f1"] = summary_json(macro_f1());
  const auto pcf = per_class_f1();
  nlohmann::json mean = nlohmann::json::array(), stddev = nlohmann::json::array(),
                 by_seed = nlohmann::json::array();
  for (const auto& s : pcf) {
    mean.push_back(s.mean);
    stddev.push_back(s.stddev);
  }
  for (const auto& m : per_seed) by_seed.push_back(m.per_class_f1);
  j["per_class_f1"] = {{"mean", mean}, {"std", stddev}, {"per_seed", by_seed}};
  nlohmann::json confusions = nlohmann::json::array();
  for (const auto& m : per_seed) confusions.push_back(confusion_json(m.confusion));
  j["confusion_per_seed"] = confusions;
  j["runtime_s"] = runtime_s;
  j["peak_mem_bytes"] = peak_mem_bytes;
  return j;
}

ExperimentReport ExperimentReport::from_json(const nlohmann::json& j) {
  ExperimentReport r;
  r.model = j.at("model").get<std::string>();
  r.config = j.at("config");
  r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  r.runtime_s = j.at("runtime_s").get<double>();
  r.peak_mem_bytes = j.at("peak_mem_bytes").get<std::int64_t>();
  const auto& acc = j.at("accuracy").at("per_seed");
  const auto& f1 = j.at("macro_f1").at("per_seed");
  const auto& pcf = j.at("per_class_f1").at("per_seed");
  const auto& conf = j.at("confusion_per_seed");
  for (std::size_t k = 0; k < r.seeds.size(); ++k) {
    Metrics m;
    m.accuracy = acc.at(k).get<double>();
    m.macro_f1 = f1.at(k).get<double>();
    m.per_class_f1 = pcf.at(k).get<std::vector<double>>();
    m.confusion = confusion_from_json(conf.at(k));
    r.per_seed.push_back(std::move(m));
  }
  return r;
}

ExperimentReport run_seeded(const std::string& model, const nlohmann::json& config,
                            const std::vector<std::uint64_t>& seeds,
                            const std::function<Metrics(std::uint64_t)>& run_one, int jobs) {
  if (seeds.empty()) {
    throw std::invalid_argument("run_seeded: need at least one seed");
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Metrics> results(seeds.size());
  std::vector<char> done(seeds.size(), 0);
  std::vector<std::string> errors(seeds.size());

  const auto run_index = [&](std::size_t k) {
    try {
      results[k] = run_one(seeds[k]);
      done[k] = 1;
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  };

  if (jobs <= 1 || seeds.size() == 1) {
    for (std::size_t k = 0; k < seeds.size(); ++k) run_index(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(jobs),
                                                        seeds.size());
    for (std::size_t w = 0; w < n_workers; ++w) {
      workers.emplace_back([&] {
        for (std::size_t k = next.fetch_add(1); k < seeds.size(); k = next.fetch_add(1)) {
          run_index(k);
        }
      });
    }
    for (auto& t : workers) t.join();
  }

  ExperimentReport report;
  report.model = model;
  report.config = config;
  std::string failure;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    if (done[k]) {
      report.seeds.push_back(seeds[k]);
      report.per_seed.push_back(std::move(results[k]));
    } else if (failure.empty()) {
      failure = "seed " + std::to_string(seeds[k]) + ": " + errors[k];
    }
  }
  report.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report.peak_mem_bytes = peak_rss_bytes();
  if (!failure.empty()) {
    throw RunSeededError("run_seeded(" + model + ") failed at " + failure, std::move(report));
  }
  return report;
}

void emit_report(const std::vector<ExperimentReport>& reports,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : reports) j.push_back(r.to_json());
    std::ofstream out(dir / "metrics.json");
    if (!out) {
      throw std::runtime_error("emit_report: cannot write " + (dir / "metrics.json").string());
    }
    out << j.dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "summary.csv");
    if (!out) {
      throw std::runtime_error("emit_report: cannot write " + (dir / "summary.csv").string());
    }
    out << "model,metric,mean,std\n";
    char buf[64];
    const auto line = [&](const std::string& model, const char* metric,
                          const MetricSummary& s) {
      std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", s.mean, s.stddev);
      out << model << ',' << metric << buf;
    };
    for (const auto& r : reports) {
      line(r.model, "accuracy", r.accuracy());
      line(r.model, "macro_f1", r.macro_f1());
    }
  }
}

void emit_plotdata(const std::string& name, std::vector<SweepPoint> points,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::sort(points.begin(), points.end(),
            [](const SweepPoint& a, const SweepPoint& b) { return a.x < b.x; });
  std::ofstream out(dir / ("plotdata_" + name + ".csv"));
  if (!out) {
    throw std::runtime_error("emit_plotdata: cannot write plotdata_" + name + ".csv");
  }
  out << "x,model,macro_f1_mean,macro_f1_std,accuracy_mean,accuracy_std\n";
  char buf[160];
  for (auto& point : points) {
    std::sort(point.reports.begin(), point.reports.end(),
              [](const ExperimentReport& a, const ExperimentReport& b) {
                return a.model < b.model;
              });
    for (const auto& r : point.reports) {
      const auto f1 = r.macro_f1();
      const auto acc = r.accuracy();
      std::snprintf(buf, sizeof(buf), "%.17g,%s,%.17g,%.17g,%.17g,%.17g\n", point.x,
                    r.model.c_str(), f1.mean, f1.stddev, acc.mean, acc.stddev);
      out << buf;
    }
  }
}

std::int64_t peak_rss_bytes() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream ss(line.substr(6));
      std::int64_t kb = 0;
      ss >> kb;
      return kb * 1024;
    }
  }
  // some kernels/containers hide VmHWM; ru_maxrss is also the high-water mark
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) == 0) {
    return usage.ru_maxrss * 1024;
  }
  return 0;
}

}  // namespace textgraph
