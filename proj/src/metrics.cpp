#include "textgraph/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace textgraph {

Metrics compute_metrics(const std::vector<int>& predictions, const std::vector<int>& golds,
                        int n_classes) {
  if (predictions.empty() || predictions.size() != golds.size()) {
    throw std::invalid_argument("compute_metrics: need equal-length, non-empty label sequences");
  }
  if (n_classes < 1) {
    throw std::invalid_argument("compute_metrics: n_classes must be >= 1");
  }
  Metrics m;
  m.confusion = Dense<std::int64_t>::Zero(n_classes, n_classes);
  for (std::size_t k = 0; k < golds.size(); ++k) {
    const int g = golds[k];
    const int p = predictions[k];
    if (g < 0 || g >= n_classes || p < 0 || p >= n_classes) {
      throw std::invalid_argument("compute_metrics: label out of range at position " +
                                  std::to_string(k));
    }
    ++m.confusion(g, p);
  }

  std::int64_t correct = 0;
  m.per_class_f1.resize(static_cast<std::size_t>(n_classes), 0.0);
  for (int c = 0; c < n_classes; ++c) {
    correct += m.confusion(c, c);
    const auto gold_total = static_cast<double>(m.confusion.row(c).sum());
    const auto pred_total = static_cast<double>(m.confusion.col(c).sum());
    const auto tp = static_cast<double>(m.confusion(c, c));
    const double precision = pred_total > 0 ? tp / pred_total : 0.0;
    const double recall = gold_total > 0 ? tp / gold_total : 0.0;
    m.per_class_f1[static_cast<std::size_t>(c)] =
        precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    m.macro_f1 += m.per_class_f1[static_cast<std::size_t>(c)];
  }
  m.macro_f1 /= static_cast<double>(n_classes);
  m.accuracy = static_cast<double>(correct) / static_cast<double>(golds.size());
  return m;
}

MetricSummary summarize(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("summarize: no values");
  }
  MetricSummary s;
  s.per_seed = std::move(values);
  for (double v : s.per_seed) s.mean += v;
  s.mean /= static_cast<double>(s.per_seed.size());
  double var = 0.0;
  for (double v : s.per_seed) var += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(s.per_seed.size()));
  return s;
}

}  // namespace textgraph
