#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "textgraph/graph.hpp"
#include "textgraph/numerics.hpp"
#include "textgraph/types.hpp"

namespace textgraph {

/// The two GCN weight matrices: theta0 is F x H, theta1 is H x C.
struct GcnParams {
  DenseX theta0;
  DenseX theta1;
};

struct GcnGradients {
  DenseX theta0;
  DenseX theta1;
};

struct TrainConfig {
  double learning_rate = 0.02;
  int max_epochs = 100;
  double dropout = 0.5;
  Index hidden = 200;
  std::uint64_t seed = 0;
  // model selection: snapshot with the best validation macro F1, earliest on ties
};

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  DenseX m0, v0, m1, v1;

  static AdamState like(const GcnParams& params);
};

/// Intermediates kept by a training-mode forward pass; gcn_backward reuses
/// the dropout masks drawn here.
struct GcnCache {
  bool training = false;
  double dropout_rate = 0.0;
  VectorX onehot_mask;  // per-node keep/scale factors (one-hot path)
  DenseX x_dropped;     // dense path input after dropout
  DenseX z1;            // post-ReLU hidden activations
  DenseX z1_dropped;
  DenseX layer2_mask;
  DenseX probs;
};

struct GcnForwardResult {
  DenseX probs;  // N x C row-stochastic
  GcnCache cache;
};

/// Two-layer GCN: probs = softmax(A_hat * drop(relu(A_hat * drop(X) * theta0)) * theta1).
/// Dropout applies to each layer's input only when training (rng required
/// then). The one-hot feature kind folds X = I into theta0 without ever
/// materializing an N x N buffer.
GcnForwardResult gcn_forward(const HeteroGraph& graph, const NodeFeatures& features,
                             const GcnParams& params, double dropout_rate, RandomSource* rng,
                             bool training);

/// Mean negative log-probability of the gold class over masked nodes;
/// probabilities are clamped below at 1e-12 before the log. The mask may
/// only select nodes with a valid label (document nodes).
double masked_cross_entropy(const DenseX& probs, const std::vector<int>& labels,
                            const std::vector<char>& mask);

/// Exact gradients of masked_cross_entropy through both layers, ReLU and the
/// forward pass's dropout masks. Requires a training-mode cache.
GcnGradients gcn_backward(const HeteroGraph& graph, const NodeFeatures& features,
                          const GcnParams& params, const GcnCache& cache,
                          const std::vector<int>& labels, const std::vector<char>& mask);

/// Bias-corrected Adam update.
void adam_step(GcnParams& params, const GcnGradients& grads, AdamState& state, double lr);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_accuracy = 0.0;
  double val_macro_f1 = 0.0;
};

struct GcnTrainResult {
  GcnParams params;  // snapshot with the best validation macro F1
  int best_epoch = 0;
  std::vector<EpochRecord> history;
};

/// Full-batch training: one Adam update per epoch, validation macro F1
/// computed with dropout off after each update. history[0].train_loss is the
/// loss before the first update.
GcnTrainResult train_gcn(const HeteroGraph& graph, const NodeFeatures& features,
                         const std::vector<int>& labels, int n_classes,
                         const std::vector<char>& labelled_mask,
                         const std::vector<char>& validation_mask, const TrainConfig& config);

// --- multinomial logistic regression ---------------------------------------

struct LogRegParams {
  DenseX weights;  // F x C
  VectorX bias;    // C
  double lambda = 1e-4;
};

namespace detail {
double spectral_norm_squared(const DenseX& x);
double spectral_norm_squared(const SparseX& x);
bool all_finite(const DenseX& x);
bool all_finite(const SparseX& x);
}  // namespace detail

std::vector<int> predict_classes(const DenseX& scores);  // row argmax, ties -> lowest index

template <typename XMat>
DenseX logreg_probabilities(const LogRegParams& p, const XMat& x) {
  DenseX logits = x * p.weights;
  logits.rowwise() += p.bias.transpose();
  return softmax_rows(logits);
}

/// Mean cross entropy plus 0.5 * lambda * ||W||^2 (bias unregularized).
template <typename XMat>
double logreg_loss(const XMat& x, const std::vector<int>& labels, double lambda,
                   const LogRegParams& p) {
  const DenseX probs = logreg_probabilities(p, x);
  double loss = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    loss -= std::log(std::max(probs(i, labels[static_cast<std::size_t>(i)]), 1e-12));
  }
  return loss / static_cast<double>(x.rows()) + 0.5 * lambda * p.weights.squaredNorm();
}

template <typename XMat>
void logreg_gradient(const XMat& x, const std::vector<int>& labels, double lambda,
                     const LogRegParams& p, DenseX& grad_w, VectorX& grad_b) {
  DenseX g = logreg_probabilities(p, x);
  for (Index i = 0; i < x.rows(); ++i) {
    g(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
  }
  g /= static_cast<double>(x.rows());
  grad_w = x.transpose() * g + lambda * p.weights;
  grad_b = g.colwise().sum().transpose();
}

/// L2-regularized softmax regression, full-batch gradient descent with fixed
/// step 0.5/L (L estimated by power iteration), stopping when the loss delta
/// drops below 1e-6 or after 1000 iterations. Deterministic: the seed
/// parameter is accepted for interface uniformity but the zero init makes it
/// unused.
template <typename XMat>
LogRegParams train_logreg(const XMat& x, const std::vector<int>& labels, int n_classes,
                          double lambda = 1e-4, std::uint64_t seed = 0) {
  (void)seed;
  const Index n = x.rows();
  const Index f = x.cols();
  if (n < n_classes) {
    throw std::invalid_argument("train_logreg: need at least one sample per class");
  }
  if (static_cast<Index>(labels.size()) != n) {
    throw std::invalid_argument("train_logreg: labels/features size mismatch");
  }
  for (int y : labels) {
    if (y < 0 || y >= n_classes) {
      throw std::invalid_argument("train_logreg: label out of range");
    }
  }
  if (!detail::all_finite(x)) {
    throw std::invalid_argument("train_logreg: features contain non-finite values");
  }

  LogRegParams p;
  p.lambda = lambda;
  p.weights = DenseX::Zero(f, n_classes);
  p.bias = VectorX::Zero(n_classes);

  const double lip = detail::spectral_norm_squared(x) / (2.0 * static_cast<double>(n)) + lambda;
  const double step = 0.5 / std::max(lip, 1e-12);

  double prev_loss = std::numeric_limits<double>::infinity();
  DenseX grad_w;
  VectorX grad_b;
  for (int iter = 0; iter < 1000; ++iter) {
    const double loss = logreg_loss(x, labels, lambda, p);
    if (std::abs(prev_loss - loss) < 1e-6) break;
    prev_loss = loss;
    logreg_gradient(x, labels, lambda, p, grad_w, grad_b);
    p.weights -= step * grad_w;
    p.bias -= step * grad_b;
  }
  return p;
}

template <typename XMat>
DenseX logreg_scores(const LogRegParams& p, const XMat& x) {
  DenseX logits = x * p.weights;
  logits.rowwise() += p.bias.transpose();
  return logits;
}

template <typename XMat>
std::vector<int> predict(const LogRegParams& p, const XMat& x) {
  return predict_classes(logreg_scores(p, x));
}

/// Inference-mode GCN prediction for every node.
std::vector<int> predict(const HeteroGraph& graph, const NodeFeatures& features,
                         const GcnParams& params);

// --- checkpoints ------------------------------------------------------------

/// Single file: one-line JSON header (shapes plus caller metadata), then the
/// raw little-endian 64-bit float buffers of theta0 and theta1 in row-major
/// order.
void save_checkpoint(const std::filesystem::path& path, const GcnParams& params,
                     const nlohmann::json& meta);
GcnParams load_checkpoint(const std::filesystem::path& path, nlohmann::json* meta = nullptr);

}  // namespace textgraph
