#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "textgraph/corpus.hpp"
#include "textgraph/embeddings.hpp"
#include "textgraph/experiments.hpp"
#include "textgraph/graph.hpp"
#include "textgraph/model.hpp"

namespace textgraph {

enum class ModelKind { kTextGcn, kTextGcnT2v, kTfidf, kCounts, kAvgEmbed, kPvdbow, kPvdm };

ModelKind parse_model(const std::string& name);  // throws on unknown names
std::string model_name(ModelKind kind);
bool is_gcn_model(ModelKind kind);

struct RunConfig {
  std::filesystem::path dataset;
  std::filesystem::path workdir;
  std::optional<std::filesystem::path> stemmer_table;
  std::optional<std::filesystem::path> stopwords;
  std::optional<std::filesystem::path> pretrained_embeddings;  // avg-embed input

  int window_size = 30;
  bool use_ppmi = true;
  double label_proportion = 0.20;
  std::string model = "textgcn";  // comma-separated list allowed for sweeps
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::uint64_t split_seed = 0;
  double logreg_lambda = 1e-4;
  int jobs = 1;

  TrainConfig train;           // lr 0.02, 100 epochs, dropout 0.5, hidden 200
  EmbeddingTrainConfig embed;  // dim 300, 20 epochs, window 5, 5 negatives
};

// Artifact locations are keyed by a content hash of their inputs plus the
// flags that shape them, so later stages reuse earlier work.
struct PreprocessPaths {
  std::filesystem::path dir, corpus_file, vocab_file, splits_file, stats_file;
};
struct GraphPaths {
  std::filesystem::path dir, coo_file, sidecar_file, cooc_file, tfidf_file;
};

std::string preprocess_key(const RunConfig& config);
std::string graph_key(const RunConfig& config);
PreprocessPaths preprocess_paths(const RunConfig& config);
GraphPaths graph_paths(const RunConfig& config);

/// Ingest + clean + split; reuses cached artifacts when present. Prints the
/// per-class split table to `log`.
PreprocessPaths cmd_preprocess(const RunConfig& config, std::ostream& log);

/// Build the normalized heterogeneous graph from preprocess artifacts (which
/// must exist). Persists the co-occurrence stats and TF-IDF matrix next to
/// the graph.
GraphPaths cmd_build_graph(const RunConfig& config, std::ostream& log);

struct LoadedCorpus {
  ProcessedCorpus corpus;
  SplitAssignment split;
};
/// Loads preprocess artifacts, naming the missing file on error.
LoadedCorpus load_preprocess_artifacts(const RunConfig& config);

/// Train + evaluate the configured model across seeds; writes metrics.json,
/// summary.csv and (for GCN models) per-seed checkpoints under
/// workdir/runs/<key>/. Returns the run directory.
std::filesystem::path cmd_train(const RunConfig& config, std::ostream& log);

enum class SweepKind { kWindow, kLabels };

struct SweepSpec {
  SweepKind kind = SweepKind::kLabels;
  std::vector<double> proportions = {0.01, 0.05, 0.10, 0.20};  // labels sweep
  std::vector<int> sizes;                                      // window sweep
  bool include_no_ppmi = false;
};

/// Fig.-style sweeps. The window sweep rebuilds the graph per size (x = 0 is
/// the no-PPMI setting); the labels sweep redraws the labelled mask per run
/// seed. Writes metrics.json, summary.csv and plotdata_<kind>.csv; returns
/// the sweep directory.
std::filesystem::path cmd_sweep(const RunConfig& config, const SweepSpec& spec,
                                std::ostream& log);

// --- building blocks shared by cmd_train, sweeps and tests -----------------

std::vector<char> labelled_doc_mask(const SplitAssignment& split, double proportion,
                                    std::uint64_t mask_seed);

/// Doc-level mask/tags widened to node level (word nodes all false).
std::vector<char> node_mask(const std::vector<char>& doc_mask, Index n_nodes);
std::vector<char> node_mask(const SplitAssignment& split, Split which, Index n_nodes);

struct GcnRunResult {
  Metrics test_metrics;
  GcnParams params;
  int best_epoch = 0;
  std::vector<EpochRecord> history;
};

/// One seeded Text GCN run: train with the labelled/validation masks, then
/// evaluate the best snapshot on the test documents.
GcnRunResult run_gcn_once(const ProcessedCorpus& corpus, const SplitAssignment& split,
                          const HeteroGraph& graph, const NodeFeatures& features,
                          const std::vector<char>& labelled_docs, const TrainConfig& base,
                          std::uint64_t seed);

/// Logistic-regression baseline on per-document features: fit on labelled
/// documents, evaluate on the test split.
template <typename XMat>
Metrics run_logreg_baseline(const XMat& features, const ProcessedCorpus& corpus,
                            const SplitAssignment& split, const std::vector<char>& labelled_docs,
                            double lambda, std::uint64_t seed);

SparseX select_rows(const SparseX& m, const std::vector<Index>& rows);
DenseX select_rows(const DenseX& m, const std::vector<Index>& rows);

extern template Metrics run_logreg_baseline<SparseX>(const SparseX&, const ProcessedCorpus&,
                                                     const SplitAssignment&,
                                                     const std::vector<char>&, double,
                                                     std::uint64_t);
extern template Metrics run_logreg_baseline<DenseX>(const DenseX&, const ProcessedCorpus&,
                                                    const SplitAssignment&,
                                                    const std::vector<char>&, double,
                                                    std::uint64_t);

}  // namespace textgraph
