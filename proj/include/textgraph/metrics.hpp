#pragma once

#include <cstdint>
#include <vector>

#include "textgraph/types.hpp"

namespace textgraph {

struct Metrics {
  double accuracy = 0.0;
  std::vector<double> per_class_f1;  // one entry per class, zero-convention
  double macro_f1 = 0.0;             // unweighted mean over all classes
  Dense<std::int64_t> confusion;     // confusion(gold, predicted)
};

/// Per-class F1 = 2PR/(P+R), defined as 0 whenever P+R = 0 (including
/// classes absent from both predictions and golds). Macro F1 averages over
/// all `n_classes` classes.
Metrics compute_metrics(const std::vector<int>& predictions, const std::vector<int>& golds,
                        int n_classes);

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::vector<double> per_seed;
};

MetricSummary summarize(std::vector<double> values);

}  // namespace textgraph
