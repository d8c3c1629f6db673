#include "textgraph/model.hpp"

#include <cstring>
#include <fstream>

#include "textgraph/metrics.hpp"

namespace textgraph {

namespace {

void check_shapes(const HeteroGraph& graph, const NodeFeatures& features,
                  const GcnParams& params) {
  if (!graph.normalized) {
    throw std::invalid_argument("gcn_forward: adjacency must be normalized");
  }
  const Index n = graph.n_nodes();
  if (features.n_nodes != n) {
    throw std::invalid_argument("gcn_forward: features built for a different graph");
  }
  if (params.theta0.rows() != features.dim()) {
    throw std::invalid_argument("gcn_forward: theta0 rows (" +
                                std::to_string(params.theta0.rows()) +
                                ") do not match feature dim (" +
                                std::to_string(features.dim()) + ")");
  }
  if (params.theta1.rows() != params.theta0.cols()) {
    throw std::invalid_argument("gcn_forward: theta0/theta1 inner dims disagree");
  }
}

DenseX relu_backward(const DenseX& upstream, const DenseX& activations) {
  return upstream.cwiseProduct(
      (activations.array() > 0.0).cast<double>().matrix());
}

VectorX onehot_keep_mask(Index n, double rate, RandomSource& rng) {
  const double scale = 1.0 / (1.0 - rate);
  VectorX mask(n);
  for (Index i = 0; i < n; ++i) {
    mask[i] = rng.uniform() < rate ? 0.0 : scale;
  }
  return mask;
}

}  // namespace

GcnForwardResult gcn_forward(const HeteroGraph& graph, const NodeFeatures& features,
                             const GcnParams& params, double dropout_rate, RandomSource* rng,
                             bool training) {
  check_shapes(graph, features, params);
  const bool dropping = training && dropout_rate > 0.0;
  if (dropping && rng == nullptr) {
    throw std::invalid_argument("gcn_forward: training with dropout needs an rng");
  }

  GcnForwardResult out;
  GcnCache& cache = out.cache;
  cache.training = training;
  cache.dropout_rate = dropout_rate;

  // Layer 1: relu(A_hat * drop(X) * theta0). For one-hot X the product
  // diag(mask) * theta0 replaces the N x N identity.
  DenseX s1;
  if (features.kind == NodeFeatures::Kind::kOneHotIdentity) {
    if (dropping) {
      cache.onehot_mask = onehot_keep_mask(graph.n_nodes(), dropout_rate, *rng);
      s1 = spmm<double>(graph.adjacency,
                        (cache.onehot_mask.asDiagonal() * params.theta0).eval());
    } else {
      s1 = spmm(graph.adjacency, params.theta0);
    }
  } else {
    if (training) {
      cache.x_dropped = dropping ? dropout(features.dense, dropout_rate, *rng, true)
                                 : features.dense;
      s1 = spmm<double>(graph.adjacency, (cache.x_dropped * params.theta0).eval());
    } else {
      s1 = spmm<double>(graph.adjacency, (features.dense * params.theta0).eval());
    }
  }
  cache.z1 = relu(s1);

  // Layer 2: softmax(A_hat * drop(z1) * theta1).
  const DenseX* z1_in = &cache.z1;
  if (training) {
    if (dropping) {
      cache.layer2_mask = dropout_mask(cache.z1.rows(), cache.z1.cols(), dropout_rate, *rng);
      cache.z1_dropped = cache.z1.cwiseProduct(cache.layer2_mask);
    } else {
      cache.z1_dropped = cache.z1;
    }
    z1_in = &cache.z1_dropped;
  }
  const DenseX s2 = spmm<double>(graph.adjacency, (*z1_in * params.theta1).eval());
  out.probs = softmax_rows(s2);
  cache.probs = out.probs;
  return out;
}

double masked_cross_entropy(const DenseX& probs, const std::vector<int>& labels,
                            const std::vector<char>& mask) {
  if (static_cast<Index>(mask.size()) != probs.rows()) {
    throw std::invalid_argument("masked_cross_entropy: mask size does not match rows");
  }
  const int n_classes = static_cast<int>(probs.cols());
  double loss = 0.0;
  std::int64_t count = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    if (i >= labels.size() || labels[i] < 0 || labels[i] >= n_classes) {
      throw std::invalid_argument("masked_cross_entropy: mask selects node " + std::to_string(i) +
                                  " without a valid label");
    }
    loss -= std::log(std::max(probs(static_cast<Index>(i), labels[i]), 1e-12));
    ++count;
  }
  if (count == 0) {
    throw std::invalid_argument("masked_cross_entropy: empty mask");
  }
  return loss / static_cast<double>(count);
}

GcnGradients gcn_backward(const HeteroGraph& graph, const NodeFeatures& features,
                          const GcnParams& params, const GcnCache& cache,
                          const std::vector<int>& labels, const std::vector<char>& mask) {
  if (!cache.training) {
    throw std::invalid_argument("gcn_backward: cache must come from a training-mode forward");
  }
  if (static_cast<Index>(mask.size()) != cache.probs.rows()) {
    throw std::invalid_argument("gcn_backward: mask size does not match cache");
  }
  const int n_classes = static_cast<int>(cache.probs.cols());

  // d loss / d logits2 = (P - Y) / |mask| on masked rows, 0 elsewhere.
  DenseX g2 = DenseX::Zero(cache.probs.rows(), cache.probs.cols());
  std::int64_t count = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    if (i >= labels.size() || labels[i] < 0 || labels[i] >= n_classes) {
      throw std::invalid_argument("gcn_backward: mask selects node " + std::to_string(i) +
                                  " without a valid label");
    }
    const auto row = static_cast<Index>(i);
    g2.row(row) = cache.probs.row(row);
    g2(row, labels[i]) -= 1.0;
    ++count;
  }
  if (count == 0) {
    throw std::invalid_argument("gcn_backward: empty mask");
  }
  g2 /= static_cast<double>(count);

  // A_hat is symmetric, so A_hat^T g = A_hat g.
  const DenseX t = spmm(graph.adjacency, g2);
  GcnGradients grads;
  grads.theta1 = cache.z1_dropped.transpose() * t;

  DenseX d_z1 = t * params.theta1.transpose();
  if (cache.layer2_mask.size() > 0) {
    d_z1 = d_z1.cwiseProduct(cache.layer2_mask);
  }
  const DenseX d_s1 = relu_backward(d_z1, cache.z1);
  const DenseX u = spmm(graph.adjacency, d_s1);
  if (features.kind == NodeFeatures::Kind::kOneHotIdentity) {
    grads.theta0 = cache.onehot_mask.size() > 0 ? (cache.onehot_mask.asDiagonal() * u).eval() : u;
  } else {
    grads.theta0 = cache.x_dropped.transpose() * u;
  }
  return grads;
}

AdamState AdamState::like(const GcnParams& params) {
  AdamState s;
  s.m0 = DenseX::Zero(params.theta0.rows(), params.theta0.cols());
  s.v0 = s.m0;
  s.m1 = DenseX::Zero(params.theta1.rows(), params.theta1.cols());
  s.v1 = s.m1;
  return s;
}

void adam_step(GcnParams& params, const GcnGradients& grads, AdamState& state, double lr) {
  if (grads.theta0.rows() != params.theta0.rows() || grads.theta0.cols() != params.theta0.cols() ||
      grads.theta1.rows() != params.theta1.rows() || grads.theta1.cols() != params.theta1.cols()) {
    throw std::invalid_argument("adam_step: gradient shapes do not match parameters");
  }
  state.step += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const auto update = [&](DenseX& p, const DenseX& g, DenseX& m, DenseX& v) {
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + state.epsilon);
  };
  update(params.theta0, grads.theta0, state.m0, state.v0);
  update(params.theta1, grads.theta1, state.m1, state.v1);
}

std::vector<int> predict_classes(const DenseX& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (Index i = 0; i < scores.rows(); ++i) {
    int best = 0;
    for (Index c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, best)) best = static_cast<int>(c);
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

std::vector<int> predict(const HeteroGraph& graph, const NodeFeatures& features,
                         const GcnParams& params) {
  return predict_classes(gcn_forward(graph, features, params, 0.0, nullptr, false).probs);
}

GcnTrainResult train_gcn(const HeteroGraph& graph, const NodeFeatures& features,
                         const std::vector<int>& labels, int n_classes,
                         const std::vector<char>& labelled_mask,
                         const std::vector<char>& validation_mask, const TrainConfig& config) {
  const auto n = static_cast<std::size_t>(graph.n_nodes());
  if (labelled_mask.size() != n || validation_mask.size() != n) {
    throw std::invalid_argument("train_gcn: masks must cover every node");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labelled_mask[i] && validation_mask[i]) {
      throw std::invalid_argument("train_gcn: labelled and validation masks overlap at node " +
                                  std::to_string(i));
    }
  }
  std::vector<Index> val_nodes;
  std::vector<int> val_golds;
  for (std::size_t i = 0; i < n; ++i) {
    if (validation_mask[i]) {
      val_nodes.push_back(static_cast<Index>(i));
      val_golds.push_back(labels[i]);
    }
  }
  if (val_nodes.empty()) {
    throw std::invalid_argument("train_gcn: empty validation mask");
  }

  RandomSource init_rng = RandomSource(config.seed).substream("init");
  RandomSource drop_rng = RandomSource(config.seed).substream("dropout");
  GcnParams params{glorot_init(features.dim(), config.hidden, init_rng),
                   glorot_init(config.hidden, n_classes, init_rng)};
  AdamState adam = AdamState::like(params);

  GcnTrainResult result;
  double best_f1 = -1.0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    auto fwd = gcn_forward(graph, features, params, config.dropout, &drop_rng, true);
    const double loss = masked_cross_entropy(fwd.probs, labels, labelled_mask);
    const GcnGradients grads =
        gcn_backward(graph, features, params, fwd.cache, labels, labelled_mask);
    adam_step(params, grads, adam, config.learning_rate);

    const auto eval = gcn_forward(graph, features, params, 0.0, nullptr, false);
    std::vector<int> val_preds;
    val_preds.reserve(val_nodes.size());
    const std::vector<int> all = predict_classes(eval.probs);
    for (Index node : val_nodes) {
      val_preds.push_back(all[static_cast<std::size_t>(node)]);
    }
    const Metrics val = compute_metrics(val_preds, val_golds, n_classes);
    result.history.push_back({epoch, loss, val.accuracy, val.macro_f1});
    if (val.macro_f1 > best_f1) {
      best_f1 = val.macro_f1;
      result.params = params;
      result.best_epoch = epoch;
    }
  }
  return result;
}

namespace detail {

double spectral_norm_squared(const DenseX& x) {
  VectorX v = VectorX::Ones(x.cols());
  v /= v.norm();
  double lambda = 0.0;
  for (int it = 0; it < 30; ++it) {
    VectorX w = x.transpose() * (x * v);
    lambda = w.norm();
    if (lambda <= 0.0) return 0.0;
    v = w / lambda;
  }
  return lambda;  // dominant eigenvalue of X^T X
}

double spectral_norm_squared(const SparseX& x) {
  VectorX v = VectorX::Ones(x.cols());
  v /= v.norm();
  double lambda = 0.0;
  for (int it = 0; it < 30; ++it) {
    VectorX w = x.transpose() * (x * v);
    lambda = w.norm();
    if (lambda <= 0.0) return 0.0;
    v = w / lambda;
  }
  return lambda;
}

bool all_finite(const DenseX& x) { return x.allFinite(); }

bool all_finite(const SparseX& x) {
  for (Index k = 0; k < x.nonZeros(); ++k) {
    if (!std::isfinite(x.valuePtr()[k])) return false;
  }
  return true;
}

}  // namespace detail

void save_checkpoint(const std::filesystem::path& path, const GcnParams& params,
                     const nlohmann::json& meta) {
  nlohmann::json header = meta;
  header["shapes"] = {{"theta0", {params.theta0.rows(), params.theta0.cols()}},
                      {"theta1", {params.theta1.rows(), params.theta1.cols()}}};
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
  }
  out << header.dump() << '\n';
  const auto dump = [&](const DenseX& m) {
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
  };
  dump(params.theta0);
  dump(params.theta1);
  if (!out) {
    throw std::runtime_error("checkpoint: write failed for " + path.string());
  }
}

GcnParams load_checkpoint(const std::filesystem::path& path, nlohmann::json* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("checkpoint: cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("checkpoint: missing header in " + path.string());
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint: bad header in " + path.string() + ": " + e.what());
  }
  const auto shape = [&](const char* name) {
    const auto& s = header.at("shapes").at(name);
    return std::pair<Index, Index>(s.at(0).get<Index>(), s.at(1).get<Index>());
  };
  GcnParams params;
  const auto read = [&](DenseX& m, std::pair<Index, Index> rc) {
    m.resize(rc.first, rc.second);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size()))) {
      throw std::runtime_error("checkpoint: truncated parameter data in " + path.string());
    }
  };
  read(params.theta0, shape("theta0"));
  read(params.theta1, shape("theta1"));
  if (meta != nullptr) {
    *meta = header;
  }
  return params;
}

}  // namespace textgraph
