#include "textgraph/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace textgraph {

CooccurrenceStats count_windows(const std::vector<std::vector<Index>>& documents,
                                Index vocab_size, int window_size) {
  if (window_size < 1) {
    throw std::invalid_argument("count_windows: window_size must be >= 1");
  }
  if (documents.empty()) {
    throw std::invalid_argument("count_windows: empty corpus");
  }
  CooccurrenceStats stats;
  stats.window_size = window_size;
  stats.single_counts.assign(static_cast<std::size_t>(vocab_size), 0);

  std::vector<Index> distinct;
  distinct.reserve(static_cast<std::size_t>(window_size));
  const auto w = static_cast<std::size_t>(window_size);
  for (const auto& doc : documents) {
    if (doc.empty()) continue;
    const std::size_t n_windows = doc.size() <= w ? 1 : doc.size() - w + 1;
    stats.total_windows += static_cast<std::int64_t>(n_windows);
    for (std::size_t start = 0; start < n_windows; ++start) {
      const std::size_t end = std::min(doc.size(), start + w);
      distinct.assign(doc.begin() + static_cast<std::ptrdiff_t>(start),
                      doc.begin() + static_cast<std::ptrdiff_t>(end));
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      for (std::size_t a = 0; a < distinct.size(); ++a) {
        ++stats.single_counts[static_cast<std::size_t>(distinct[a])];
        for (std::size_t b = a + 1; b < distinct.size(); ++b) {
          ++stats.pair_counts[CooccurrenceStats::pair_key(distinct[a], distinct[b])];
        }
      }
    }
  }
  return stats;
}

std::optional<double> pmi(const CooccurrenceStats& stats, Index i, Index j) {
  if (i == j) {
    throw std::invalid_argument("pmi: i and j must differ");
  }
  const std::int64_t wi = stats.single(i);
  const std::int64_t wj = stats.single(j);
  const std::int64_t wij = stats.pair(i, j);
  if (wi == 0 || wj == 0 || wij == 0) {
    return std::nullopt;
  }
  const auto total = static_cast<double>(stats.total_windows);
  return std::log(static_cast<double>(wij) * total /
                  (static_cast<double>(wi) * static_cast<double>(wj)));
}

SparseX ppmi_matrix(const CooccurrenceStats& stats) {
  const Index v = stats.vocab_size();
  std::vector<Triplet> triplets;
  triplets.reserve(stats.pair_counts.size() * 2);
  const auto total = static_cast<double>(stats.total_windows);
  for (const auto& [key, wij] : stats.pair_counts) {
    const auto i = static_cast<Index>(key >> 32);
    const auto j = static_cast<Index>(key & 0xFFFFFFFFULL);
    const double value = std::log(static_cast<double>(wij) * total /
                                  (static_cast<double>(stats.single(i)) *
                                   static_cast<double>(stats.single(j))));
    if (value > 0.0) {
      triplets.emplace_back(i, j, value);
      triplets.emplace_back(j, i, value);
    }
  }
  SparseX m(v, v);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

namespace {

SparseX doc_term_matrix(const std::vector<std::vector<Index>>& documents,
                        const Vocabulary& vocabulary, bool idf_weight) {
  const auto n_docs = static_cast<Index>(documents.size());
  const Index n_words = vocabulary.size();
  std::vector<Triplet> triplets;
  std::unordered_map<Index, std::int64_t> counts;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    counts.clear();
    for (Index w : documents[d]) ++counts[w];
    for (const auto& [w, count] : counts) {
      double value = static_cast<double>(count);
      if (idf_weight) {
        const auto df = static_cast<double>(vocabulary.doc_frequency(w));
        value *= std::log(static_cast<double>(n_docs) / df);
        if (value == 0.0) continue;  // df == n_docs
      }
      triplets.emplace_back(static_cast<Index>(d), w, value);
    }
  }
  SparseX m(n_docs, n_words);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace

SparseX tfidf_matrix(const std::vector<std::vector<Index>>& documents,
                     const Vocabulary& vocabulary) {
  return doc_term_matrix(documents, vocabulary, true);
}

SparseX term_count_matrix(const std::vector<std::vector<Index>>& documents,
                          const Vocabulary& vocabulary) {
  return doc_term_matrix(documents, vocabulary, false);
}

void CooccurrenceStats::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cooccurrence: cannot open " + path.string() + " for writing");
  }
  out << window_size << ' ' << total_windows << ' ' << single_counts.size() << '\n';
  for (std::size_t i = 0; i < single_counts.size(); ++i) {
    if (single_counts[i] > 0) {
      out << i << ' ' << single_counts[i] << '\n';
    }
  }
  std::vector<std::uint64_t> keys;
  keys.reserve(pair_counts.size());
  for (const auto& [key, count] : pair_counts) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  for (std::uint64_t key : keys) {
    out << (key >> 32) << ' ' << (key & 0xFFFFFFFFULL) << ' ' << pair_counts.at(key) << '\n';
  }
  if (!out) {
    throw std::runtime_error("cooccurrence: write failed for " + path.string());
  }
}

CooccurrenceStats CooccurrenceStats::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cooccurrence: cannot open " + path.string());
  }
  CooccurrenceStats stats;
  std::size_t vocab = 0;
  if (!(in >> stats.window_size >> stats.total_windows >> vocab)) {
    throw std::runtime_error("cooccurrence: bad header in " + path.string());
  }
  stats.single_counts.assign(vocab, 0);
  std::vector<std::int64_t> values;
  std::int64_t a = 0, b = 0, c = 0;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    if (ss >> a >> b) {
      if (ss >> c) {
        stats.pair_counts[pair_key(static_cast<Index>(a), static_cast<Index>(b))] = c;
      } else {
        stats.single_counts.at(static_cast<std::size_t>(a)) = b;
      }
    } else {
      throw std::runtime_error("cooccurrence: malformed line in " + path.string());
    }
  }
  return stats;
}

}  // namespace textgraph
