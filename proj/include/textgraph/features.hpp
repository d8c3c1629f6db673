#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <unordered_map>
#include <vector>

#include "textgraph/corpus.hpp"
#include "textgraph/types.hpp"

namespace textgraph {

/// Sliding-window co-occurrence counts with set (binary-per-window)
/// semantics: W(i) = number of windows containing word i at least once,
/// W(i,j) likewise for the pair, #W = total windows.
struct CooccurrenceStats {
  int window_size = 0;
  std::int64_t total_windows = 0;
  std::vector<std::int64_t> single_counts;                      // W(i), indexed by word id
  std::unordered_map<std::uint64_t, std::int64_t> pair_counts;  // keyed (min,max)

  static std::uint64_t pair_key(Index i, Index j) {
    const auto lo = static_cast<std::uint64_t>(i < j ? i : j);
    const auto hi = static_cast<std::uint64_t>(i < j ? j : i);
    return (lo << 32) | hi;
  }

  std::int64_t single(Index i) const { return single_counts[static_cast<std::size_t>(i)]; }
  std::int64_t pair(Index i, Index j) const {
    const auto it = pair_counts.find(pair_key(i, j));
    return it == pair_counts.end() ? 0 : it->second;
  }

  Index vocab_size() const { return static_cast<Index>(single_counts.size()); }

  /// Text artifact: header "window_size total_windows vocab_size", then
  /// "i count" lines (ascending i), then "i j count" lines (ascending pairs).
  void save(const std::filesystem::path& path) const;
  static CooccurrenceStats load(const std::filesystem::path& path);
};

/// Windows slide by stride 1 inside each document, never across documents.
/// A document of length L contributes 1 window when L <= window_size, else
/// L - window_size + 1. Empty documents contribute nothing.
CooccurrenceStats count_windows(const std::vector<std::vector<Index>>& documents,
                                Index vocab_size, int window_size);

/// ln of observed-over-expected window co-occurrence:
/// ln((W(i,j)/#W) / ((W(i)/#W) * (W(j)/#W))). No value when any count is 0.
std::optional<double> pmi(const CooccurrenceStats& stats, Index i, Index j);

/// Symmetric |vocab| x |vocab| matrix of max(PMI, 0), storing only strictly
/// positive entries; the diagonal stays empty.
SparseX ppmi_matrix(const CooccurrenceStats& stats);

/// |docs| x |vocab| matrix, entry (d,w) = count(w in d) * ln(N / df(w));
/// zeros (including every word with df = N) are not stored.
SparseX tfidf_matrix(const std::vector<std::vector<Index>>& documents,
                     const Vocabulary& vocabulary);

/// Raw per-document term counts, same shape as tfidf_matrix.
SparseX term_count_matrix(const std::vector<std::vector<Index>>& documents,
                          const Vocabulary& vocabulary);

}  // namespace textgraph
