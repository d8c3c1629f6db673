#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "support/synthetic.hpp"
#include "textgraph/features.hpp"
#include "textgraph/graph.hpp"
#include "textgraph/numerics.hpp"

using namespace textgraph;

namespace {

SparseX empty_sparse(Index rows, Index cols) {
  SparseX m(rows, cols);
  m.makeCompressed();
  return m;
}

struct RandomGraphInputs {
  SparseX tfidf;
  SparseX ppmi;
};

RandomGraphInputs random_inputs(RandomSource& rng, Index n_docs, Index n_words) {
  std::vector<Triplet> tf;
  for (Index d = 0; d < n_docs; ++d) {
    for (Index w = 0; w < n_words; ++w) {
      if (rng.uniform() < 0.4) tf.emplace_back(d, w, rng.uniform(0.1, 3.0));
    }
  }
  std::vector<Triplet> pp;
  for (Index i = 0; i < n_words; ++i) {
    for (Index j = i + 1; j < n_words; ++j) {
      if (rng.uniform() < 0.3) {
        const double v = rng.uniform(0.05, 2.0);
        pp.emplace_back(i, j, v);
        pp.emplace_back(j, i, v);
      }
    }
  }
  RandomGraphInputs in{empty_sparse(n_docs, n_words), empty_sparse(n_words, n_words)};
  in.tfidf.setFromTriplets(tf.begin(), tf.end());
  in.ppmi.setFromTriplets(pp.begin(), pp.end());
  return in;
}

// Dense reference: adjacency per the three-case definition, then
// D^(-1/2) A D^(-1/2).
DenseX dense_adjacency(const SparseX& tfidf, const SparseX& ppmi) {
  const Index n_docs = tfidf.rows();
  const Index n = n_docs + tfidf.cols();
  DenseX a = DenseX::Zero(n, n);
  for (Index k = 0; k < n; ++k) a(k, k) = 1.0;
  const DenseX t = DenseX(tfidf);
  const DenseX p = DenseX(ppmi);
  for (Index d = 0; d < t.rows(); ++d) {
    for (Index w = 0; w < t.cols(); ++w) {
      if (t(d, w) != 0.0) {
        a(d, n_docs + w) = t(d, w);
        a(n_docs + w, d) = t(d, w);
      }
    }
  }
  for (Index i = 0; i < p.rows(); ++i) {
    for (Index j = 0; j < p.cols(); ++j) {
      if (i != j && p(i, j) > 0.0) a(n_docs + i, n_docs + j) = p(i, j);
    }
  }
  return a;
}

DenseX dense_normalize(const DenseX& a) {
  const VectorX d = a.rowwise().sum();
  DenseX out = a;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out(i, j) = a(i, j) / std::sqrt(d[i] * d[j]);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("build_adjacency examples") {
  // empty inputs: only the diagonal condition fires
  const HeteroGraph g0 = build_adjacency(empty_sparse(2, 2), empty_sparse(2, 2));
  CHECK(g0.n_nodes() == 4);
  CHECK(g0.adjacency.nonZeros() == 4);
  CHECK(DenseX(g0.adjacency) == DenseX::Identity(4, 4));

  // one document, one word with tfidf 1.5
  SparseX tfidf(1, 1);
  tfidf.insert(0, 0) = 1.5;
  tfidf.makeCompressed();
  const HeteroGraph g1 = build_adjacency(tfidf, empty_sparse(1, 1));
  CHECK(g1.adjacency.nonZeros() == 4);
  CHECK(g1.adjacency.coeff(0, 0) == 1.0);
  CHECK(g1.adjacency.coeff(1, 1) == 1.0);
  CHECK(g1.adjacency.coeff(0, 1) == 1.5);
  CHECK(g1.adjacency.coeff(1, 0) == 1.5);
  CHECK_FALSE(g1.normalized);

  CHECK_THROWS_AS(build_adjacency(empty_sparse(2, 3), empty_sparse(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("build_adjacency structural invariants") {
  RandomSource rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const Index n_docs = 2 + static_cast<Index>(rng.uniform_index(6));
    const Index n_words = 2 + static_cast<Index>(rng.uniform_index(6));
    const auto in = random_inputs(rng, n_docs, n_words);
    const HeteroGraph g = build_adjacency(in.tfidf, in.ppmi);
    const DenseX a = DenseX(g.adjacency);
    CHECK(a == a.transpose().eval());
    for (Index k = 0; k < g.n_nodes(); ++k) {
      CHECK(a(k, k) == 1.0);  // exactly one
    }
    // no document-document edges
    for (Index d1 = 0; d1 < n_docs; ++d1) {
      for (Index d2 = 0; d2 < n_docs; ++d2) {
        if (d1 != d2) CHECK(a(d1, d2) == 0.0);
      }
    }
  }
}

TEST_CASE("normalize_adjacency examples") {
  const HeteroGraph id = build_adjacency(empty_sparse(1, 1), empty_sparse(1, 1));
  const HeteroGraph idn = normalize_adjacency(id);
  CHECK(idn.normalized);
  CHECK(DenseX(idn.adjacency) == DenseX::Identity(2, 2));

  HeteroGraph two;
  two.n_docs = 1;
  two.n_words = 1;
  two.adjacency = empty_sparse(2, 2);
  two.adjacency.insert(0, 0) = 1.0;
  two.adjacency.insert(0, 1) = 1.0;
  two.adjacency.insert(1, 0) = 1.0;
  two.adjacency.insert(1, 1) = 1.0;
  two.adjacency.makeCompressed();
  const HeteroGraph norm = normalize_adjacency(two);
  CHECK(((DenseX(norm.adjacency).array() - 0.5).abs() <= 1e-15).all());
  CHECK_THROWS_AS(normalize_adjacency(norm), std::invalid_argument);

  HeteroGraph dangling;  // node 1 has no entries at all -> zero degree
  dangling.n_docs = 1;
  dangling.n_words = 1;
  dangling.adjacency = empty_sparse(2, 2);
  dangling.adjacency.insert(0, 0) = 1.0;
  dangling.adjacency.makeCompressed();
  CHECK_THROWS_AS(normalize_adjacency(dangling), std::runtime_error);
}

TEST_CASE("normalization matches the dense oracle") {
  RandomSource rng(22);
  for (int rep = 0; rep < 10; ++rep) {
    const Index n_docs = 2 + static_cast<Index>(rng.uniform_index(10));
    const Index n_words = 2 + static_cast<Index>(rng.uniform_index(14));
    const auto in = random_inputs(rng, n_docs, n_words);
    const HeteroGraph g = normalize_adjacency(build_adjacency(in.tfidf, in.ppmi));
    const DenseX expected = dense_normalize(dense_adjacency(in.tfidf, in.ppmi));
    CHECK(((DenseX(g.adjacency) - expected).array().abs() <= 1e-12).all());
    // sparsity pattern unchanged by normalization
    CHECK(g.adjacency.nonZeros() == build_adjacency(in.tfidf, in.ppmi).adjacency.nonZeros());
  }
}

TEST_CASE("normalized adjacency has spectral radius <= 1") {
  RandomSource rng(23);
  for (int rep = 0; rep < 8; ++rep) {
    const auto in = random_inputs(rng, 4 + static_cast<Index>(rng.uniform_index(8)),
                                  4 + static_cast<Index>(rng.uniform_index(8)));
    const HeteroGraph g = normalize_adjacency(build_adjacency(in.tfidf, in.ppmi));
    VectorX v = VectorX::Ones(g.n_nodes());
    v /= v.norm();
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
      VectorX w = g.adjacency * v;
      lambda = w.norm();
      if (lambda == 0.0) break;
      v = w / lambda;
    }
    CHECK(lambda <= 1.0 + 1e-9);
  }
}

TEST_CASE("one-hot features are virtual") {
  const HeteroGraph g = normalize_adjacency(build_adjacency(empty_sparse(3, 2), empty_sparse(2, 2)));
  const NodeFeatures f = make_onehot_features(g);
  CHECK(f.kind == NodeFeatures::Kind::kOneHotIdentity);
  CHECK(f.dim() == g.n_nodes());
  CHECK(f.dense.size() == 0);  // no buffer at all

  // A_hat * I * Theta == A_hat * Theta
  RandomSource rng(24);
  const auto in = random_inputs(rng, 4, 5);
  const HeteroGraph gr = normalize_adjacency(build_adjacency(in.tfidf, in.ppmi));
  const DenseX theta = glorot_init(gr.n_nodes(), 6, rng);
  DenseX eye = DenseX::Identity(gr.n_nodes(), gr.n_nodes());
  const DenseX lhs = spmm(gr.adjacency, eye) * theta;
  const DenseX rhs = spmm(gr.adjacency, theta);
  CHECK(((lhs - rhs).array().abs() <= 1e-12).all());
}

TEST_CASE("t2v features") {
  const auto prepared = synth::prepared({.n_docs = 12, .n_classes = 3, .vocab_per_class = 2,
                                         .min_len = 4, .max_len = 6, .seed = 3});
  const auto& corpus = prepared.corpus;
  const SparseX tfidf = tfidf_matrix(corpus.documents, corpus.vocabulary);
  const HeteroGraph g = normalize_adjacency(build_adjacency(
      tfidf, empty_sparse(corpus.vocabulary.size(), corpus.vocabulary.size())));

  const Index dim = 300;
  EmbeddingTable words;
  words.kind = EmbeddingTable::Kind::kWord;
  words.dim = dim;
  EmbeddingTable docs;
  docs.kind = EmbeddingTable::Kind::kDocument;
  docs.dim = dim;
  RandomSource rng(25);
  words.vectors = glorot_init(corpus.vocabulary.size(), dim, rng);
  for (Index w = 0; w < corpus.vocabulary.size(); ++w) {
    words.names.push_back(corpus.vocabulary.token(w));
    words.index.emplace(words.names.back(), w);
  }
  docs.vectors = glorot_init(corpus.n_docs(), dim, rng);
  for (Index d = 0; d < corpus.n_docs(); ++d) {
    docs.names.push_back("doc:" + corpus.doc_ids[static_cast<std::size_t>(d)]);
    docs.index.emplace(docs.names.back(), d);
  }

  const NodeFeatures f = make_t2v_features(g, words, docs, corpus.vocabulary, corpus.doc_ids);
  CHECK(f.kind == NodeFeatures::Kind::kDense);
  CHECK(f.dense.rows() == g.n_nodes());
  CHECK(f.dense.cols() == 300);
  // row order: documents first, then words, in id order
  CHECK(f.dense.row(0) == docs.vectors.row(0));
  CHECK(f.dense.row(g.n_docs) == words.vectors.row(0));

  // missing vectors are reported with their keys
  EmbeddingTable missing_docs = docs;
  missing_docs.index.erase(missing_docs.names[1]);
  CHECK_THROWS_WITH_AS(
      static_cast<void>(make_t2v_features(g, words, missing_docs, corpus.vocabulary,
                                          corpus.doc_ids)),
      doctest::Contains("doc:doc1"), std::runtime_error);
}

TEST_CASE("graph artifact round trip") {
  RandomSource rng(26);
  const auto in = random_inputs(rng, 5, 7);
  const HeteroGraph g = normalize_adjacency(build_adjacency(in.tfidf, in.ppmi));
  const auto dir = std::filesystem::temp_directory_path();
  save_graph(g, 30, dir / "tg_graph.coo", dir / "tg_graph.json");
  int window = 0;
  const HeteroGraph r = load_graph(dir / "tg_graph.coo", dir / "tg_graph.json", &window);
  CHECK(window == 30);
  CHECK(r.n_docs == g.n_docs);
  CHECK(r.n_words == g.n_words);
  CHECK(r.normalized == g.normalized);
  CHECK(DenseX(r.adjacency) == DenseX(g.adjacency));
  std::filesystem::remove(dir / "tg_graph.coo");
  std::filesystem::remove(dir / "tg_graph.json");
}
