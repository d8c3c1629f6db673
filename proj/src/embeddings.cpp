#include "textgraph/embeddings.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace textgraph {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// -ln sigmoid(x), computed stably.
double softplus_neg(double x) {
  return x > 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

using RowExpr = Eigen::RowVectorXd;

DenseX small_uniform_init(Index rows, Index cols, RandomSource& rng) {
  const double bound = 0.5 / static_cast<double>(cols);
  DenseX m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = rng.uniform(-bound, bound);
    }
  }
  return m;
}

// One negative-sampling output step for input activation `v`: updates the
// output rows in place (using their pre-update values for the input
// gradient, as in the reference implementations) and leaves dLoss/dv in
// `err`. Negatives that collide with the target are skipped.
void sgns_output_step(const RowExpr& v, DenseX& out_table, Index target,
                      const NegativeSampler& sampler, int negatives, double lr, RandomSource& rng,
                      RowExpr& err) {
  err.setZero();
  double s = v.dot(out_table.row(target));
  double g = sigmoid(s) - 1.0;
  err += g * out_table.row(target);
  out_table.row(target) -= (lr * g) * v;
  for (int k = 0; k < negatives; ++k) {
    const Index neg = sampler.sample(rng);
    if (neg == target) continue;
    s = v.dot(out_table.row(neg));
    g = sigmoid(s);
    err += g * out_table.row(neg);
    out_table.row(neg) -= (lr * g) * v;
  }
}

std::vector<std::string> doc_names(const ProcessedCorpus& corpus) {
  std::vector<std::string> names;
  names.reserve(corpus.doc_ids.size());
  for (const auto& id : corpus.doc_ids) names.push_back("doc:" + id);
  return names;
}

EmbeddingTable make_table(EmbeddingTable::Kind kind, std::vector<std::string> names,
                          DenseX vectors) {
  EmbeddingTable t;
  t.kind = kind;
  t.dim = vectors.cols();
  t.names = std::move(names);
  t.vectors = std::move(vectors);
  for (std::size_t k = 0; k < t.names.size(); ++k) {
    t.index.emplace(t.names[k], static_cast<Index>(k));
  }
  return t;
}

// Runs `body(doc_index, rng)` over document shards; workers == 1 stays on
// the calling thread and is the deterministic reference.
template <typename Body>
void run_sharded(Index n_docs, int workers, const RandomSource& base, Body&& body) {
  if (workers <= 1) {
    RandomSource rng = base.substream("w0");
    for (Index d = 0; d < n_docs; ++d) body(d, rng);
    return;
  }
  std::vector<std::thread> threads;
  const Index per = (n_docs + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const Index lo = per * w;
    const Index hi = std::min(n_docs, lo + per);
    if (lo >= hi) break;
    threads.emplace_back([&, lo, hi, w] {
      RandomSource rng = base.substream("w" + std::to_string(w));
      for (Index d = lo; d < hi; ++d) body(d, rng);
    });
  }
  for (auto& t : threads) t.join();
}

void check_trainable(const ProcessedCorpus& corpus, const EmbeddingTrainConfig& config) {
  if (corpus.vocabulary.size() < 2) {
    throw std::invalid_argument("embedding training needs a vocabulary of size >= 2");
  }
  if (corpus.documents.empty()) {
    throw std::invalid_argument("embedding training needs a non-empty corpus");
  }
  if (config.dimension < 1 || config.epochs < 1 || config.negatives < 1 ||
      config.context_window < 1) {
    throw std::invalid_argument(
        "embedding config: dimension, epochs, negatives and context_window must be >= 1");
  }
}

std::vector<std::int64_t> vocab_counts(const Vocabulary& v) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) counts[static_cast<std::size_t>(i)] = v.frequency(i);
  return counts;
}

}  // namespace

// --- NegativeSampler ---------------------------------------------------------

NegativeSampler::NegativeSampler(const std::vector<std::int64_t>& counts, double power) {
  const std::size_t n = counts.size();
  if (n == 0) {
    throw std::invalid_argument("NegativeSampler: empty count table");
  }
  probs_.resize(static_cast<Index>(n));
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[i] < 0) {
      throw std::invalid_argument("NegativeSampler: negative count");
    }
    probs_[static_cast<Index>(i)] = std::pow(static_cast<double>(counts[i]), power);
    z += probs_[static_cast<Index>(i)];
  }
  if (z <= 0.0) {
    throw std::invalid_argument("NegativeSampler: all counts are zero");
  }
  probs_ /= z;

  // Walker alias tables; queues processed in index order for determinism.
  accept_.assign(n, 1.0);
  alias_.resize(n);
  for (std::size_t i = 0; i < n; ++i) alias_[i] = static_cast<Index>(i);
  std::vector<double> scaled(n);
  std::vector<Index> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = probs_[static_cast<Index>(i)] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<Index>(i));
  }
  while (!small.empty() && !large.empty()) {
    const Index s = small.back();
    small.pop_back();
    const Index l = large.back();
    accept_[static_cast<std::size_t>(s)] = scaled[static_cast<std::size_t>(s)];
    alias_[static_cast<std::size_t>(s)] = l;
    scaled[static_cast<std::size_t>(l)] += scaled[static_cast<std::size_t>(s)] - 1.0;
    if (scaled[static_cast<std::size_t>(l)] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
}

Index NegativeSampler::sample(RandomSource& rng) const {
  const auto k = static_cast<std::size_t>(rng.uniform_index(accept_.size()));
  return rng.uniform() < accept_[k] ? static_cast<Index>(k) : alias_[k];
}

// --- pair objective ----------------------------------------------------------

double sgns_pair_loss(const VectorX& v, const VectorX& u_pos,
                      const std::vector<VectorX>& u_negs) {
  double loss = softplus_neg(v.dot(u_pos));
  for (const auto& u : u_negs) {
    loss += softplus_neg(-v.dot(u));
  }
  return loss;
}

void sgns_pair_grad(const VectorX& v, const VectorX& u_pos, const std::vector<VectorX>& u_negs,
                    VectorX& grad_v, VectorX& grad_pos, std::vector<VectorX>& grad_negs) {
  const double g_pos = sigmoid(v.dot(u_pos)) - 1.0;
  grad_v = g_pos * u_pos;
  grad_pos = g_pos * v;
  grad_negs.resize(u_negs.size());
  for (std::size_t k = 0; k < u_negs.size(); ++k) {
    const double g = sigmoid(v.dot(u_negs[k]));
    grad_v += g * u_negs[k];
    grad_negs[k] = g * v;
  }
}

// --- trainers ------------------------------------------------------------------

EmbeddingTable train_skipgram(const ProcessedCorpus& corpus, const EmbeddingTrainConfig& config,
                              std::uint64_t seed) {
  check_trainable(corpus, config);
  const Index v_size = corpus.vocabulary.size();
  const Index dim = config.dimension;
  const RandomSource base = RandomSource(seed).substream("skipgram");

  RandomSource init_rng = base.substream("init");
  DenseX syn0 = small_uniform_init(v_size, dim, init_rng);
  DenseX syn1 = DenseX::Zero(v_size, dim);
  const NegativeSampler sampler(vocab_counts(corpus.vocabulary), config.sampling_power);

  const int window = config.context_window;
  std::int64_t pairs_per_epoch = 0;
  for (const auto& doc : corpus.documents) {
    const auto len = static_cast<std::int64_t>(doc.size());
    for (std::int64_t i = 0; i < len; ++i) {
      pairs_per_epoch += std::min(len - 1, i + window) - std::max<std::int64_t>(0, i - window);
    }
  }
  const LinearDecay decay{config.initial_step, config.step_floor,
                          pairs_per_epoch * config.epochs};

  std::atomic<std::int64_t> step{0};
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const RandomSource epoch_base = base.substream("epoch" + std::to_string(epoch));
    run_sharded(corpus.n_docs(), config.workers, epoch_base,
                [&](Index d, RandomSource& rng) {
                  const auto& doc = corpus.documents[static_cast<std::size_t>(d)];
                  const auto len = static_cast<std::ptrdiff_t>(doc.size());
                  RowExpr err(dim);
                  for (std::ptrdiff_t i = 0; i < len; ++i) {
                    const Index center = doc[static_cast<std::size_t>(i)];
                    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
                    const std::ptrdiff_t hi = std::min(len - 1, i + window);
                    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
                      if (j == i) continue;
                      const double lr =
                          decay.at(step.fetch_add(1, std::memory_order_relaxed));
                      const RowExpr v = syn0.row(center);
                      sgns_output_step(v, syn1, doc[static_cast<std::size_t>(j)], sampler,
                                       config.negatives, lr, rng, err);
                      syn0.row(center) -= lr * err;
                    }
                  }
                });
  }
  return make_table(EmbeddingTable::Kind::kWord, corpus.vocabulary.tokens(), std::move(syn0));
}

EmbeddingTable train_pvdbow(const ProcessedCorpus& corpus, const EmbeddingTrainConfig& config,
                            std::uint64_t seed) {
  check_trainable(corpus, config);
  const Index dim = config.dimension;
  const RandomSource base = RandomSource(seed).substream("pvdbow");

  RandomSource init_rng = base.substream("init");
  DenseX docs = small_uniform_init(corpus.n_docs(), dim, init_rng);
  DenseX syn1 = DenseX::Zero(corpus.vocabulary.size(), dim);
  const NegativeSampler sampler(vocab_counts(corpus.vocabulary), config.sampling_power);

  std::int64_t tokens = 0;
  for (const auto& doc : corpus.documents) tokens += static_cast<std::int64_t>(doc.size());
  const LinearDecay decay{config.initial_step, config.step_floor, tokens * config.epochs};

  std::atomic<std::int64_t> step{0};
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const RandomSource epoch_base = base.substream("epoch" + std::to_string(epoch));
    run_sharded(corpus.n_docs(), config.workers, epoch_base,
                [&](Index d, RandomSource& rng) {
                  const auto& doc = corpus.documents[static_cast<std::size_t>(d)];
                  RowExpr err(dim);
                  for (Index token : doc) {
                    const double lr = decay.at(step.fetch_add(1, std::memory_order_relaxed));
                    const RowExpr v = docs.row(d);
                    sgns_output_step(v, syn1, token, sampler, config.negatives, lr, rng, err);
                    docs.row(d) -= lr * err;
                  }
                });
  }
  return make_table(EmbeddingTable::Kind::kDocument, doc_names(corpus), std::move(docs));
}

EmbeddingTable train_pvdm(const ProcessedCorpus& corpus, const EmbeddingTrainConfig& config,
                          std::uint64_t seed) {
  check_trainable(corpus, config);
  const Index dim = config.dimension;
  const RandomSource base = RandomSource(seed).substream("pvdm");

  RandomSource doc_rng = base.substream("init_docs");
  RandomSource word_rng = base.substream("init_words");
  DenseX docs = small_uniform_init(corpus.n_docs(), dim, doc_rng);
  DenseX words = small_uniform_init(corpus.vocabulary.size(), dim, word_rng);
  DenseX syn1 = DenseX::Zero(corpus.vocabulary.size(), dim);
  const NegativeSampler sampler(vocab_counts(corpus.vocabulary), config.sampling_power);

  std::int64_t tokens = 0;
  for (const auto& doc : corpus.documents) tokens += static_cast<std::int64_t>(doc.size());
  const LinearDecay decay{config.initial_step, config.step_floor, tokens * config.epochs};
  const int window = config.context_window;

  std::atomic<std::int64_t> step{0};
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const RandomSource epoch_base = base.substream("epoch" + std::to_string(epoch));
    run_sharded(corpus.n_docs(), config.workers, epoch_base,
                [&](Index d, RandomSource& rng) {
                  const auto& doc = corpus.documents[static_cast<std::size_t>(d)];
                  const auto len = static_cast<std::ptrdiff_t>(doc.size());
                  RowExpr h(dim), err(dim);
                  for (std::ptrdiff_t i = 0; i < len; ++i) {
                    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
                    const std::ptrdiff_t hi = std::min(len - 1, i + window);
                    // mean of the document vector and the context word vectors
                    h = docs.row(d);
                    int m = 1;
                    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
                      if (j == i) continue;
                      h += words.row(doc[static_cast<std::size_t>(j)]);
                      ++m;
                    }
                    h /= static_cast<double>(m);
                    const double lr = decay.at(step.fetch_add(1, std::memory_order_relaxed));
                    sgns_output_step(h, syn1, doc[static_cast<std::size_t>(i)], sampler,
                                     config.negatives, lr, rng, err);
                    err *= lr / static_cast<double>(m);
                    docs.row(d) -= err;
                    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
                      if (j == i) continue;
                      words.row(doc[static_cast<std::size_t>(j)]) -= err;
                    }
                  }
                });
  }
  return make_table(EmbeddingTable::Kind::kDocument, doc_names(corpus), std::move(docs));
}

// --- table io ------------------------------------------------------------------

std::optional<Index> EmbeddingTable::find(const std::string& name) const {
  const auto it = index.find(name);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

void EmbeddingTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("embeddings: cannot open " + path.string() + " for writing");
  }
  out << names.size() << ' ' << dim << '\n';
  char buf[32];
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k].find_first_of(" \t\n") != std::string::npos) {
      throw std::runtime_error("embeddings: name contains whitespace: " + names[k]);
    }
    out << names[k];
    for (Index j = 0; j < dim; ++j) {
      std::snprintf(buf, sizeof(buf), " %.17g", vectors(static_cast<Index>(k), j));
      out << buf;
    }
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("embeddings: write failed for " + path.string());
  }
}

EmbeddingTable load_pretrained(const std::filesystem::path& path) {
  return EmbeddingTable::load(path, EmbeddingTable::Kind::kWord);
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path, Kind kind) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("embeddings: cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("embeddings: " + path.string() + " is empty");
  }
  std::istringstream header(line);
  Index count = 0, dim = 0;
  if (!(header >> count >> dim) || count < 0 || dim < 1) {
    throw std::runtime_error("embeddings: bad header (line 1) in " + path.string());
  }
  EmbeddingTable t;
  t.kind = kind;
  t.dim = dim;
  t.vectors.resize(count, dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto row = static_cast<Index>(t.names.size());
    if (row >= count) {
      throw std::runtime_error("embeddings: more than " + std::to_string(count) +
                               " rows at line " + std::to_string(line_no) + " in " +
                               path.string());
    }
    std::istringstream ss(line);
    std::string name;
    ss >> name;
    for (Index j = 0; j < dim; ++j) {
      if (!(ss >> t.vectors(row, j))) {
        throw std::runtime_error("embeddings: line " + std::to_string(line_no) + " in " +
                                 path.string() + " has fewer than " + std::to_string(dim) +
                                 " values");
      }
    }
    double extra;
    if (ss >> extra) {
      throw std::runtime_error("embeddings: line " + std::to_string(line_no) + " in " +
                               path.string() + " has more than " + std::to_string(dim) +
                               " values");
    }
    t.index.emplace(name, row);
    t.names.push_back(std::move(name));
  }
  if (static_cast<Index>(t.names.size()) != count) {
    throw std::runtime_error("embeddings: header promises " + std::to_string(count) +
                             " rows, found " + std::to_string(t.names.size()) + " in " +
                             path.string());
  }
  return t;
}

VectorX average_document_embedding(const std::vector<Index>& document,
                                   const EmbeddingTable& table, const Vocabulary& vocabulary) {
  if (table.kind != EmbeddingTable::Kind::kWord) {
    throw std::invalid_argument("average_document_embedding: table must hold word vectors");
  }
  VectorX sum = VectorX::Zero(table.dim);
  Index covered = 0;
  for (Index id : document) {
    if (const auto row = table.find(vocabulary.token(id))) {
      sum += table.vectors.row(*row).transpose();
      ++covered;
    }
  }
  if (covered > 0) {
    sum /= static_cast<double>(covered);
  }
  return sum;
}

}  // namespace textgraph
