#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "textgraph/corpus.hpp"
#include "textgraph/types.hpp"

namespace textgraph {

struct EmbeddingTable {
  enum class Kind { kWord, kDocument };
  Kind kind = Kind::kWord;
  Index dim = 0;
  std::vector<std::string> names;  // row i <-> names[i]; documents use "doc:<id>"
  std::unordered_map<std::string, Index> index;
  DenseX vectors;  // names.size() x dim

  Index rows() const { return static_cast<Index>(names.size()); }
  std::optional<Index> find(const std::string& name) const;

  /// Text format: first line "count dim", then "name v1 ... vdim" per row,
  /// 17 significant digits (round-trip exact).
  void save(const std::filesystem::path& path) const;
  static EmbeddingTable load(const std::filesystem::path& path, Kind kind);
};

/// Training hyperparameters, pinned so every deviation from "defaults as per
/// the original papers" is visible in one place.
struct EmbeddingTrainConfig {
  Index dimension = 300;
  int epochs = 20;
  int context_window = 5;
  int negatives = 5;
  double sampling_power = 0.75;
  double initial_step = 0.025;  // PV-DM uses 0.05
  double step_floor = 1e-4;
  std::int64_t min_frequency = 1;
  int workers = 1;  // >1 = lock-free racing updates, excluded from determinism
};

/// Draws word ids from the unigram distribution raised to `power`,
/// normalized. Alias method: O(1) per draw, deterministic per rng stream.
class NegativeSampler {
 public:
  NegativeSampler(const std::vector<std::int64_t>& counts, double power);
  Index sample(RandomSource& rng) const;
  const VectorX& probabilities() const { return probs_; }

 private:
  VectorX probs_;                 // normalized target distribution
  std::vector<double> accept_;    // alias tables
  std::vector<Index> alias_;
};

/// Linear step-size decay from `initial` to `floor` over `total` scheduled
/// updates.
struct LinearDecay {
  double initial = 0.025;
  double floor = 1e-4;
  std::int64_t total = 1;

  double at(std::int64_t step) const {
    const double frac = total > 0 ? static_cast<double>(step) / static_cast<double>(total) : 1.0;
    const double lr = initial * (1.0 - frac);
    return lr > floor ? lr : floor;
  }
};

/// Negative-sampling pair objective: -ln s(v.u_pos) - sum_k ln s(-v.u_neg_k)
/// with s the logistic sigmoid. Exposed so gradients can be checked against
/// finite differences.
double sgns_pair_loss(const VectorX& v, const VectorX& u_pos,
                      const std::vector<VectorX>& u_negs);
void sgns_pair_grad(const VectorX& v, const VectorX& u_pos, const std::vector<VectorX>& u_negs,
                    VectorX& grad_v, VectorX& grad_pos, std::vector<VectorX>& grad_negs);

/// Skip-gram with negative sampling over the processed corpus; returns
/// input-side word vectors keyed by vocabulary token. Deterministic per seed
/// with workers == 1.
EmbeddingTable train_skipgram(const ProcessedCorpus& corpus, const EmbeddingTrainConfig& config,
                              std::uint64_t seed);

/// PV-DBOW: the document vector predicts every token of its document.
EmbeddingTable train_pvdbow(const ProcessedCorpus& corpus, const EmbeddingTrainConfig& config,
                            std::uint64_t seed);

/// PV-DM (mean combiner): the document vector averaged with the context word
/// vectors predicts the center word.
EmbeddingTable train_pvdm(const ProcessedCorpus& corpus, const EmbeddingTrainConfig& config,
                          std::uint64_t seed);

/// Reads the standard text embedding format (header "count dim"). Errors
/// carry the offending line number.
EmbeddingTable load_pretrained(const std::filesystem::path& path);

/// Mean of the vectors of the document's tokens that are present in the
/// table; absent tokens are skipped; a document with no covered token maps
/// to the zero vector.
VectorX average_document_embedding(const std::vector<Index>& document, const EmbeddingTable& table,
                                   const Vocabulary& vocabulary);

}  // namespace textgraph
