#include "textgraph/graph.hpp"

#include "textgraph/numerics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace textgraph {

HeteroGraph build_adjacency(const SparseX& tfidf, const SparseX& ppmi) {
  const Index n_docs = tfidf.rows();
  const Index n_words = tfidf.cols();
  if (ppmi.rows() != n_words || ppmi.cols() != n_words) {
    throw std::invalid_argument("build_adjacency: ppmi must be vocab x vocab (" +
                                std::to_string(n_words) + "), got " +
                                std::to_string(ppmi.rows()) + "x" + std::to_string(ppmi.cols()));
  }
  const Index n = n_docs + n_words;
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(n) + 2 * static_cast<std::size_t>(tfidf.nonZeros()) +
                   static_cast<std::size_t>(ppmi.nonZeros()));
  for (Index k = 0; k < n; ++k) {
    triplets.emplace_back(k, k, 1.0);
  }
  for (Index d = 0; d < tfidf.outerSize(); ++d) {
    for (SparseX::InnerIterator it(tfidf, d); it; ++it) {
      const Index w = n_docs + it.col();
      triplets.emplace_back(it.row(), w, it.value());
      triplets.emplace_back(w, it.row(), it.value());
    }
  }
  for (Index i = 0; i < ppmi.outerSize(); ++i) {
    for (SparseX::InnerIterator it(ppmi, i); it; ++it) {
      if (it.row() == it.col()) continue;  // diagonal owned by the identity condition
      triplets.emplace_back(n_docs + it.row(), n_docs + it.col(), it.value());
    }
  }
  HeteroGraph g;
  g.n_docs = n_docs;
  g.n_words = n_words;
  g.adjacency.resize(n, n);
  g.adjacency.setFromTriplets(triplets.begin(), triplets.end());
  g.adjacency.makeCompressed();
  return g;
}

HeteroGraph normalize_adjacency(HeteroGraph graph) {
  if (graph.normalized) {
    throw std::invalid_argument("normalize_adjacency: graph is already normalized");
  }
  const Index n = graph.adjacency.rows();
  VectorX degree = VectorX::Zero(n);
  for (Index i = 0; i < graph.adjacency.outerSize(); ++i) {
    for (SparseX::InnerIterator it(graph.adjacency, i); it; ++it) {
      degree[it.row()] += it.value();
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (!(degree[i] > 0.0)) {
      throw std::runtime_error("normalize_adjacency: node " + std::to_string(i) +
                               " has non-positive degree");
    }
  }
  for (Index i = 0; i < graph.adjacency.outerSize(); ++i) {
    for (SparseX::InnerIterator it(graph.adjacency, i); it; ++it) {
      it.valueRef() = it.value() / std::sqrt(degree[it.row()] * degree[it.col()]);
    }
  }
  graph.normalized = true;
  return graph;
}

NodeFeatures make_onehot_features(const HeteroGraph& graph) {
  NodeFeatures f;
  f.kind = NodeFeatures::Kind::kOneHotIdentity;
  f.n_nodes = graph.n_nodes();
  return f;
}

NodeFeatures make_t2v_features(const HeteroGraph& graph, const EmbeddingTable& word_vectors,
                               const EmbeddingTable& doc_vectors, const Vocabulary& vocabulary,
                               const std::vector<std::string>& doc_ids) {
  if (word_vectors.dim != doc_vectors.dim) {
    throw std::invalid_argument("make_t2v_features: word and document tables disagree on "
                                "dimension (" +
                                std::to_string(word_vectors.dim) + " vs " +
                                std::to_string(doc_vectors.dim) + ")");
  }
  if (static_cast<Index>(doc_ids.size()) != graph.n_docs || vocabulary.size() != graph.n_words) {
    throw std::invalid_argument("make_t2v_features: corpus does not match graph shape");
  }
  NodeFeatures f;
  f.kind = NodeFeatures::Kind::kDense;
  f.n_nodes = graph.n_nodes();
  f.dense.resize(graph.n_nodes(), word_vectors.dim);

  std::vector<std::string> missing;
  for (Index d = 0; d < graph.n_docs; ++d) {
    const std::string key = "doc:" + doc_ids[static_cast<std::size_t>(d)];
    if (const auto row = doc_vectors.find(key)) {
      f.dense.row(d) = doc_vectors.vectors.row(*row);
    } else {
      missing.push_back(key);
    }
  }
  for (Index w = 0; w < graph.n_words; ++w) {
    const std::string& token = vocabulary.token(w);
    if (const auto row = word_vectors.find(token)) {
      f.dense.row(graph.word_node(w)) = word_vectors.vectors.row(*row);
    } else {
      missing.push_back(token);
    }
  }
  if (!missing.empty()) {
    std::string msg = "make_t2v_features: missing vectors for " +
                      std::to_string(missing.size()) + " node(s):";
    for (std::size_t k = 0; k < missing.size() && k < 10; ++k) msg += " " + missing[k];
    if (missing.size() > 10) msg += " ...";
    throw std::runtime_error(msg);
  }
  return f;
}

void save_graph(const HeteroGraph& graph, int window_size, const std::filesystem::path& coo_path,
                const std::filesystem::path& sidecar_path) {
  save_coo(graph.adjacency, coo_path);
  nlohmann::json j = {{"n_docs", graph.n_docs},
                      {"n_words", graph.n_words},
                      {"normalized", graph.normalized},
                      {"window_size", window_size},
                      {"node_order", "docs_then_words"}};
  std::ofstream out(sidecar_path);
  if (!out) {
    throw std::runtime_error("save_graph: cannot open " + sidecar_path.string());
  }
  out << j.dump(2) << '\n';
}

HeteroGraph load_graph(const std::filesystem::path& coo_path,
                       const std::filesystem::path& sidecar_path, int* window_size) {
  std::ifstream in(sidecar_path);
  if (!in) {
    throw std::runtime_error("load_graph: cannot open " + sidecar_path.string());
  }
  nlohmann::json j;
  in >> j;
  HeteroGraph g;
  g.n_docs = j.at("n_docs").get<Index>();
  g.n_words = j.at("n_words").get<Index>();
  g.normalized = j.at("normalized").get<bool>();
  if (j.at("node_order").get<std::string>() != "docs_then_words") {
    throw std::runtime_error("load_graph: unsupported node order in " + sidecar_path.string());
  }
  if (window_size != nullptr) {
    *window_size = j.at("window_size").get<int>();
  }
  g.adjacency = load_coo(coo_path);
  if (g.adjacency.rows() != g.n_nodes() || g.adjacency.cols() != g.n_nodes()) {
    throw std::runtime_error("load_graph: adjacency shape does not match sidecar");
  }
  return g;
}

}  // namespace textgraph
