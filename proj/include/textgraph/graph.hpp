#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "textgraph/corpus.hpp"
#include "textgraph/embeddings.hpp"
#include "textgraph/types.hpp"

namespace textgraph {

/// Heterogeneous document-word graph. Node ids: documents occupy
/// [0, n_docs), words occupy [n_docs, n_docs + n_words).
struct HeteroGraph {
  Index n_docs = 0;
  Index n_words = 0;
  SparseX adjacency;  // symmetric, unit diagonal before normalization
  bool normalized = false;

  Index n_nodes() const { return n_docs + n_words; }
  Index word_node(Index word_id) const { return n_docs + word_id; }
};

/// A(doc d, word w) = A(word w, doc d) = tfidf(d, w); A between word nodes is
/// the PPMI entry when positive; A(k, k) = 1 for every node; no other
/// entries (in particular no document-document edges).
HeteroGraph build_adjacency(const SparseX& tfidf, const SparseX& ppmi);

/// Symmetric degree normalization: out(i,j) = A(i,j) / sqrt(d_i * d_j) with
/// d_i the row sum. The unit diagonal of build_adjacency already plays the
/// self-loop role, so no extra identity is added. Sparsity pattern is
/// unchanged.
HeteroGraph normalize_adjacency(HeteroGraph graph);

/// Node input features. The one-hot kind is the implicit N x N identity and
/// deliberately carries no buffer; the first GCN layer must fold it away
/// rather than materialize it.
struct NodeFeatures {
  enum class Kind { kOneHotIdentity, kDense };
  Kind kind = Kind::kOneHotIdentity;
  Index n_nodes = 0;
  DenseX dense;  // empty for one-hot

  Index dim() const { return kind == Kind::kOneHotIdentity ? n_nodes : dense.cols(); }
};

NodeFeatures make_onehot_features(const HeteroGraph& graph);

/// Dense N x F features: document rows come from `doc_vectors` (keys
/// "doc:<id>"), word rows from `word_vectors` (keys = vocabulary tokens), in
/// graph node order. Throws if any node has no vector, listing the missing
/// keys.
NodeFeatures make_t2v_features(const HeteroGraph& graph, const EmbeddingTable& word_vectors,
                               const EmbeddingTable& doc_vectors, const Vocabulary& vocabulary,
                               const std::vector<std::string>& doc_ids);

/// Graph artifact: adjacency in COO format plus a JSON sidecar
/// {n_docs, n_words, normalized, window_size, node_order}.
void save_graph(const HeteroGraph& graph, int window_size, const std::filesystem::path& coo_path,
                const std::filesystem::path& sidecar_path);
HeteroGraph load_graph(const std::filesystem::path& coo_path,
                       const std::filesystem::path& sidecar_path, int* window_size = nullptr);

}  // namespace textgraph
