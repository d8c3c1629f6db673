#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "support/synthetic.hpp"
#include "textgraph/embeddings.hpp"

using namespace textgraph;

namespace {

double cosine(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

EmbeddingTrainConfig tiny_config() {
  EmbeddingTrainConfig c;
  c.dimension = 16;
  c.epochs = 15;
  return c;
}

ProcessedCorpus two_topic_corpus(int n_docs, std::uint64_t seed) {
  return synth::prepared({.n_docs = n_docs,
                          .n_classes = 2,
                          .vocab_per_class = 8,
                          .min_len = 10,
                          .max_len = 16,
                          .seed = seed})
      .corpus;
}

}  // namespace

TEST_CASE("negative sampler follows the 0.75-power unigram distribution") {
  const std::vector<std::int64_t> counts = {1, 2, 4, 8, 16, 100, 300, 50};
  const NegativeSampler sampler(counts, 0.75);

  double z = 0.0;
  VectorX expected(8);
  for (int i = 0; i < 8; ++i) {
    expected[i] = std::pow(static_cast<double>(counts[static_cast<std::size_t>(i)]), 0.75);
    z += expected[i];
  }
  expected /= z;
  CHECK(((sampler.probabilities() - expected).array().abs() <= 1e-15).all());

  RandomSource rng(7);
  VectorX hits = VectorX::Zero(8);
  const int draws = 1000000;
  for (int k = 0; k < draws; ++k) {
    hits[sampler.sample(rng)] += 1.0;
  }
  hits /= draws;
  for (int i = 0; i < 8; ++i) {
    CHECK(std::abs(hits[i] - expected[i]) <= 0.01 * expected[i]);
  }
}

TEST_CASE("pair loss gradients match central finite differences") {
  RandomSource rng(5);
  const Index dim = 6;
  const auto rand_vec = [&] {
    VectorX v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = rng.uniform(-0.8, 0.8);
    return v;
  };
  VectorX v = rand_vec(), u_pos = rand_vec();
  std::vector<VectorX> u_negs = {rand_vec(), rand_vec(), rand_vec()};

  VectorX gv, gpos;
  std::vector<VectorX> gnegs;
  sgns_pair_grad(v, u_pos, u_negs, gv, gpos, gnegs);

  const double h = 1e-5;
  const auto check_grad = [&](VectorX& target, const VectorX& analytic) {
    for (Index i = 0; i < dim; ++i) {
      const double keep = target[i];
      target[i] = keep + h;
      const double up = sgns_pair_loss(v, u_pos, u_negs);
      target[i] = keep - h;
      const double down = sgns_pair_loss(v, u_pos, u_negs);
      target[i] = keep;
      const double fd = (up - down) / (2.0 * h);
      CHECK(std::abs(fd - analytic[i]) <=
            1e-5 * std::max({1.0, std::abs(fd), std::abs(analytic[i])}));
    }
  };
  check_grad(v, gv);
  check_grad(u_pos, gpos);
  for (std::size_t k = 0; k < u_negs.size(); ++k) {
    check_grad(u_negs[k], gnegs[k]);
  }
}

TEST_CASE("linear step decay") {
  const LinearDecay decay{0.025, 1e-4, 1000};
  CHECK(decay.at(0) == 0.025);
  CHECK(decay.at(500) == doctest::Approx(0.0125).epsilon(1e-12));
  CHECK(decay.at(250) == doctest::Approx(0.025 * 0.75).epsilon(1e-12));
  CHECK(decay.at(1000) == 1e-4);
  CHECK(decay.at(999999) == 1e-4);
  // exactly linear between the start and the floor
  const double d1 = decay.at(100) - decay.at(200);
  const double d2 = decay.at(600) - decay.at(700);
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
}

TEST_CASE("skip-gram separates topics") {
  const ProcessedCorpus corpus = two_topic_corpus(60, 11);
  const EmbeddingTable table = train_skipgram(corpus, tiny_config(), 1);
  REQUIRE(table.rows() == corpus.vocabulary.size());
  CHECK(table.kind == EmbeddingTable::Kind::kWord);

  double within = 0.0, across = 0.0;
  int n_within = 0, n_across = 0;
  for (Index i = 0; i < table.rows(); ++i) {
    CHECK(table.vectors.row(i).allFinite());
    CHECK(table.vectors.row(i).norm() > 0.0);
    for (Index j = i + 1; j < table.rows(); ++j) {
      const bool same = table.names[static_cast<std::size_t>(i)][0] ==
                        table.names[static_cast<std::size_t>(j)][0];
      const double c = cosine(table.vectors.row(i), table.vectors.row(j));
      (same ? within : across) += c;
      ++(same ? n_within : n_across);
    }
  }
  CHECK(within / n_within > across / n_across);
}

TEST_CASE("skip-gram is deterministic per seed") {
  const ProcessedCorpus corpus = two_topic_corpus(20, 12);
  EmbeddingTrainConfig config = tiny_config();
  config.epochs = 3;
  const EmbeddingTable a = train_skipgram(corpus, config, 9);
  const EmbeddingTable b = train_skipgram(corpus, config, 9);
  CHECK(a.vectors == b.vectors);
  const EmbeddingTable c = train_skipgram(corpus, config, 10);
  CHECK(a.vectors != c.vectors);
}

TEST_CASE("skip-gram rejects degenerate vocabularies and configs") {
  ProcessedCorpus corpus;
  corpus.vocabulary = Vocabulary::build({{"solo"}});
  corpus.documents = {{0}};
  corpus.doc_ids = {"d0"};
  corpus.labels = {0};
  corpus.class_names = {"a", "b"};
  CHECK_THROWS_AS(train_skipgram(corpus, tiny_config(), 0), std::invalid_argument);

  const ProcessedCorpus ok = two_topic_corpus(12, 16);
  EmbeddingTrainConfig zero_epochs = tiny_config();
  zero_epochs.epochs = 0;
  CHECK_THROWS_AS(train_skipgram(ok, zero_epochs, 0), std::invalid_argument);
  EmbeddingTrainConfig zero_neg = tiny_config();
  zero_neg.negatives = 0;
  CHECK_THROWS_AS(train_pvdbow(ok, zero_neg, 0), std::invalid_argument);
}

TEST_CASE("pvdbow pulls duplicate documents together") {
  // documents 0 and 1 are identical; the rest drift over two topics
  ProcessedCorpus corpus = two_topic_corpus(30, 13);
  corpus.documents[1] = corpus.documents[0];
  const EmbeddingTable table = train_pvdbow(corpus, tiny_config(), 2);
  REQUIRE(table.rows() == corpus.n_docs());
  CHECK(table.kind == EmbeddingTable::Kind::kDocument);
  CHECK(table.names[0] == "doc:doc0");

  const double dup = cosine(table.vectors.row(0), table.vectors.row(1));
  double cross = 0.0;
  int n = 0;
  for (Index j = 2; j < table.rows(); ++j) {
    cross += cosine(table.vectors.row(0), table.vectors.row(j));
    ++n;
  }
  CHECK(dup > cross / n);

  const EmbeddingTable again = train_pvdbow(corpus, tiny_config(), 2);
  CHECK(table.vectors == again.vectors);
}

TEST_CASE("pvdm pulls duplicate documents together") {
  ProcessedCorpus corpus = two_topic_corpus(30, 14);
  corpus.documents[1] = corpus.documents[0];
  EmbeddingTrainConfig config = tiny_config();
  config.initial_step = 0.05;
  const EmbeddingTable table = train_pvdm(corpus, config, 3);
  REQUIRE(table.rows() == corpus.n_docs());

  const double dup = cosine(table.vectors.row(0), table.vectors.row(1));
  double cross = 0.0;
  int n = 0;
  for (Index j = 2; j < table.rows(); ++j) {
    cross += cosine(table.vectors.row(0), table.vectors.row(j));
    ++n;
  }
  CHECK(dup > cross / n);

  const EmbeddingTable again = train_pvdm(corpus, config, 3);
  CHECK(table.vectors == again.vectors);
}

TEST_CASE("load_pretrained parses the text format") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "tg_pretrained.vec";
  {
    std::ofstream out(path);
    out << "2 3\nhabari 0.5 -1 0.25\nmpira 1 2 3\n";
  }
  const EmbeddingTable t = load_pretrained(path);
  CHECK(t.dim == 3);
  CHECK(t.rows() == 2);
  REQUIRE(t.find("habari").has_value());
  CHECK(t.vectors(*t.find("habari"), 1) == -1.0);
  CHECK_FALSE(t.find("siasa").has_value());

  {
    std::ofstream out(path);
    out << "1 3\nhabari 0.5 -1 0.25 9\n";
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(load_pretrained(path)), doctest::Contains("line 2"),
                       std::runtime_error);
  {
    std::ofstream out(path);
    out << "2 3\nhabari 0.5 -1 0.25\n";
  }
  CHECK_THROWS_AS(static_cast<void>(load_pretrained(path)), std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("embedding table round trip is exact") {
  const ProcessedCorpus corpus = two_topic_corpus(15, 15);
  EmbeddingTrainConfig config = tiny_config();
  config.epochs = 2;
  const EmbeddingTable table = train_pvdbow(corpus, config, 4);
  const auto path = std::filesystem::temp_directory_path() / "tg_docs.vec";
  table.save(path);
  const EmbeddingTable loaded = EmbeddingTable::load(path, EmbeddingTable::Kind::kDocument);
  CHECK(loaded.names == table.names);
  CHECK(loaded.vectors == table.vectors);  // 17 significant digits round-trip
  std::filesystem::remove(path);
}

TEST_CASE("average_document_embedding") {
  EmbeddingTable t;
  t.kind = EmbeddingTable::Kind::kWord;
  t.dim = 2;
  t.names = {"aa", "bb"};
  t.index = {{"aa", 0}, {"bb", 1}};
  t.vectors.resize(2, 2);
  t.vectors << 1.0, 0.0, 0.0, 1.0;
  const Vocabulary v = build_vocabulary({{"aa", "bb", "cc"}});

  const VectorX single = average_document_embedding({*v.id_of("aa")}, t, v);
  CHECK(single[0] == 1.0);
  CHECK(single[1] == 0.0);

  const VectorX mean = average_document_embedding({*v.id_of("aa"), *v.id_of("bb")}, t, v);
  CHECK(mean[0] == 0.5);
  CHECK(mean[1] == 0.5);

  // absent tokens are skipped; fully uncovered documents map to zero
  const VectorX skip = average_document_embedding({*v.id_of("aa"), *v.id_of("cc")}, t, v);
  CHECK(skip[0] == 1.0);
  const VectorX zero = average_document_embedding({*v.id_of("cc")}, t, v);
  CHECK(zero.isZero(0.0));
}
