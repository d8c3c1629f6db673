#include "textgraph/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "textgraph/features.hpp"

namespace textgraph {

namespace {

struct Hasher {
  std::uint64_t h = 0xcbf29ce484222325ULL;

  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t k = 0; k < n; ++k) {
      h ^= b[k];
      h *= 0x100000001b3ULL;
    }
  }
  void str(std::string_view s) {
    bytes(s.data(), s.size());
    const char sep = '\x1f';
    bytes(&sep, 1);
  }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v) { bytes(&v, sizeof v); }
  void i32(int v) { bytes(&v, sizeof v); }
  void file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
      throw std::runtime_error("cannot read " + p.string());
    }
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
      bytes(buf, static_cast<std::size_t>(in.gcount()));
    }
  }
  std::string hex() const {
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
  }
};

void hash_embed_config(Hasher& h, const EmbeddingTrainConfig& e) {
  h.u64(static_cast<std::uint64_t>(e.dimension));
  h.i32(e.epochs);
  h.i32(e.context_window);
  h.i32(e.negatives);
  h.f64(e.sampling_power);
  h.f64(e.initial_step);
  h.f64(e.step_floor);
  h.u64(static_cast<std::uint64_t>(e.min_frequency));
}

std::string embed_key(const RunConfig& config) {
  Hasher h;
  h.str("embeddings");
  h.str(preprocess_key(config));
  hash_embed_config(h, config.embed);
  return h.hex();
}

nlohmann::json config_snapshot(const RunConfig& config, const std::string& model,
                               double proportion, const char* mask_policy) {
  return {{"model", model},
          {"window_size", config.window_size},
          {"use_ppmi", config.use_ppmi},
          {"label_proportion", proportion},
          {"mask_policy", mask_policy},
          {"split_seed", config.split_seed},
          {"learning_rate", config.train.learning_rate},
          {"max_epochs", config.train.max_epochs},
          {"dropout", config.train.dropout},
          {"hidden", config.train.hidden},
          {"logreg_lambda", config.logreg_lambda},
          {"embed",
           {{"dimension", config.embed.dimension},
            {"epochs", config.embed.epochs},
            {"context_window", config.embed.context_window},
            {"negatives", config.embed.negatives}}}};
}

void print_split_table(const LoadedCorpus& lc, std::ostream& log) {
  const auto& corpus = lc.corpus;
  const int n_classes = corpus.n_classes();
  std::vector<std::array<Index, 3>> counts(static_cast<std::size_t>(n_classes), {0, 0, 0});
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    ++counts[static_cast<std::size_t>(corpus.labels[d])]
            [static_cast<std::size_t>(lc.split.split[d])];
  }
  std::size_t width = 5;
  for (const auto& name : corpus.class_names) width = std::max(width, name.size());
  log << std::left << std::setw(static_cast<int>(width + 2)) << "class" << std::right
      << std::setw(8) << "train" << std::setw(12) << "validation" << std::setw(8) << "test"
      << '\n';
  std::array<Index, 3> total = {0, 0, 0};
  for (int c = 0; c < n_classes; ++c) {
    const auto& row = counts[static_cast<std::size_t>(c)];
    log << std::left << std::setw(static_cast<int>(width + 2))
        << corpus.class_names[static_cast<std::size_t>(c)] << std::right << std::setw(8) << row[0]
        << std::setw(12) << row[1] << std::setw(8) << row[2] << '\n';
    for (int s = 0; s < 3; ++s) total[static_cast<std::size_t>(s)] += row[static_cast<std::size_t>(s)];
  }
  log << std::left << std::setw(static_cast<int>(width + 2)) << "total" << std::right
      << std::setw(8) << total[0] << std::setw(12) << total[1] << std::setw(8) << total[2]
      << '\n';
}

void require_file(const std::filesystem::path& p, const char* producer) {
  if (!std::filesystem::exists(p)) {
    throw std::runtime_error("missing artifact " + p.string() + " (run `" + producer +
                             "` first)");
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

ModelKind parse_model(const std::string& name) {
  if (name == "textgcn") return ModelKind::kTextGcn;
  if (name == "textgcn-t2v") return ModelKind::kTextGcnT2v;
  if (name == "tfidf") return ModelKind::kTfidf;
  if (name == "counts") return ModelKind::kCounts;
  if (name == "avg-embed") return ModelKind::kAvgEmbed;
  if (name == "pvdbow") return ModelKind::kPvdbow;
  if (name == "pvdm") return ModelKind::kPvdm;
  throw std::invalid_argument(
      "unknown model '" + name +
      "' (expected textgcn, textgcn-t2v, tfidf, counts, avg-embed, pvdbow or pvdm)");
}

std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kTextGcn:
      return "textgcn";
    case ModelKind::kTextGcnT2v:
      return "textgcn-t2v";
    case ModelKind::kTfidf:
      return "tfidf";
    case ModelKind::kCounts:
      return "counts";
    case ModelKind::kAvgEmbed:
      return "avg-embed";
    case ModelKind::kPvdbow:
      return "pvdbow";
    case ModelKind::kPvdm:
      return "pvdm";
  }
  return "?";
}

bool is_gcn_model(ModelKind kind) {
  return kind == ModelKind::kTextGcn || kind == ModelKind::kTextGcnT2v;
}

std::string preprocess_key(const RunConfig& config) {
  Hasher h;
  h.str("preprocess");
  h.file(config.dataset);
  if (config.stopwords) {
    h.str("stopwords");
    h.file(*config.stopwords);
  } else {
    h.str("builtin-stopwords");
  }
  if (config.stemmer_table) {
    h.str("stemmer");
    h.file(*config.stemmer_table);
  } else {
    h.str("identity-stemmer");
  }
  h.u64(config.split_seed);
  h.f64(config.label_proportion);
  return h.hex();
}

std::string graph_key(const RunConfig& config) {
  Hasher h;
  h.str("graph");
  h.str(preprocess_key(config));
  h.i32(config.window_size);
  h.i32(config.use_ppmi ? 1 : 0);
  return h.hex();
}

PreprocessPaths preprocess_paths(const RunConfig& config) {
  PreprocessPaths p;
  p.dir = config.workdir / "preprocess" / preprocess_key(config);
  p.corpus_file = p.dir / "corpus.txt";
  p.vocab_file = p.dir / "vocab.tsv";
  p.splits_file = p.dir / "splits.csv";
  p.stats_file = p.dir / "preprocess.json";
  return p;
}

GraphPaths graph_paths(const RunConfig& config) {
  GraphPaths p;
  p.dir = config.workdir / "graphs" / graph_key(config);
  p.coo_file = p.dir / "graph.coo";
  p.sidecar_file = p.dir / "graph.json";
  p.cooc_file = p.dir / "cooccurrence.txt";
  p.tfidf_file = p.dir / "tfidf.coo";
  return p;
}

std::vector<char> labelled_doc_mask(const SplitAssignment& split, double proportion,
                                    std::uint64_t mask_seed) {
  return select_labelled_subset(split, proportion, mask_seed);
}

std::vector<char> node_mask(const std::vector<char>& doc_mask, Index n_nodes) {
  std::vector<char> mask(static_cast<std::size_t>(n_nodes), 0);
  std::copy(doc_mask.begin(), doc_mask.end(), mask.begin());
  return mask;
}

std::vector<char> node_mask(const SplitAssignment& split, Split which, Index n_nodes) {
  std::vector<char> mask(static_cast<std::size_t>(n_nodes), 0);
  for (std::size_t d = 0; d < split.split.size(); ++d) {
    if (split.split[d] == which) mask[d] = 1;
  }
  return mask;
}

LoadedCorpus load_preprocess_artifacts(const RunConfig& config) {
  const PreprocessPaths paths = preprocess_paths(config);
  require_file(paths.corpus_file, "preprocess");
  require_file(paths.vocab_file, "preprocess");
  require_file(paths.splits_file, "preprocess");
  LoadedCorpus lc;
  lc.corpus = ProcessedCorpus::load(paths.corpus_file, Vocabulary::load(paths.vocab_file));
  lc.split = SplitAssignment::load(paths.splits_file, lc.corpus.doc_ids);
  return lc;
}

PreprocessPaths cmd_preprocess(const RunConfig& config, std::ostream& log) {
  const PreprocessPaths paths = preprocess_paths(config);
  LoadedCorpus lc;
  if (std::filesystem::exists(paths.corpus_file) && std::filesystem::exists(paths.vocab_file) &&
      std::filesystem::exists(paths.splits_file)) {
    lc = load_preprocess_artifacts(config);
    log << "preprocess: reusing " << paths.dir.string() << "\n";
  } else {
    const auto raw = load_dataset(config.dataset);
    PreprocessOptions options;
    options.stopwords =
        config.stopwords ? load_stopwords(*config.stopwords) : default_stopwords();
    TableStemmer table;
    if (config.stemmer_table) {
      table = TableStemmer::load(*config.stemmer_table);
      options.stemmer = &table;
    }
    auto result = preprocess(raw, options);
    auto split = split_corpus(result.corpus, config.split_seed);
    split.labelled = labelled_doc_mask(split, config.label_proportion, config.split_seed);

    std::filesystem::create_directories(paths.dir);
    result.corpus.save(paths.corpus_file);
    result.corpus.vocabulary.save(paths.vocab_file);
    split.save(paths.splits_file, result.corpus.doc_ids);
    const nlohmann::json stats = {{"raw_documents", raw.size()},
                                  {"documents", result.corpus.documents.size()},
                                  {"classes", result.corpus.class_names},
                                  {"vocabulary", result.corpus.vocabulary.size()},
                                  {"dropped_empty", result.dropped_empty},
                                  {"stemmed", result.stem.stemmed},
                                  {"discarded_long", result.stem.discarded},
                                  {"stemmer_warnings", result.stem.warnings},
                                  {"split_seed", config.split_seed},
                                  {"label_proportion", config.label_proportion}};
    std::ofstream stats_out(paths.stats_file);
    stats_out << stats.dump(2) << '\n';
    log << "preprocess: " << result.corpus.documents.size() << " documents, vocabulary "
        << result.corpus.vocabulary.size() << ", dropped " << result.dropped_empty
        << " empty\n";
    lc = {std::move(result.corpus), std::move(split)};
  }
  print_split_table(lc, log);
  return paths;
}

GraphPaths cmd_build_graph(const RunConfig& config, std::ostream& log) {
  const GraphPaths paths = graph_paths(config);
  if (std::filesystem::exists(paths.coo_file) && std::filesystem::exists(paths.sidecar_file) &&
      std::filesystem::exists(paths.tfidf_file)) {
    log << "build-graph: reusing " << paths.dir.string() << "\n";
    return paths;
  }
  const LoadedCorpus lc = load_preprocess_artifacts(config);
  const SparseX tfidf = tfidf_matrix(lc.corpus.documents, lc.corpus.vocabulary);
  SparseX ppmi(lc.corpus.vocabulary.size(), lc.corpus.vocabulary.size());
  std::filesystem::create_directories(paths.dir);
  if (config.use_ppmi) {
    const CooccurrenceStats stats =
        count_windows(lc.corpus.documents, lc.corpus.vocabulary.size(), config.window_size);
    stats.save(paths.cooc_file);
    ppmi = ppmi_matrix(stats);
  }
  const HeteroGraph graph = normalize_adjacency(build_adjacency(tfidf, ppmi));
  save_graph(graph, config.window_size, paths.coo_file, paths.sidecar_file);
  save_coo(tfidf, paths.tfidf_file);
  log << "build-graph: " << graph.n_nodes() << " nodes (" << graph.n_docs << " docs + "
      << graph.n_words << " words), " << graph.adjacency.nonZeros() << " edges"
      << (config.use_ppmi ? "" : ", ppmi omitted") << "\n";
  return paths;
}

GcnRunResult run_gcn_once(const ProcessedCorpus& corpus, const SplitAssignment& split,
                          const HeteroGraph& graph, const NodeFeatures& features,
                          const std::vector<char>& labelled_docs, const TrainConfig& base,
                          std::uint64_t seed) {
  const Index n = graph.n_nodes();
  TrainConfig cfg = base;
  cfg.seed = seed;
  auto trained = train_gcn(graph, features, corpus.labels, corpus.n_classes(),
                           node_mask(labelled_docs, n), node_mask(split, Split::kValidation, n),
                           cfg);
  const std::vector<int> all = predict(graph, features, trained.params);
  std::vector<int> preds, golds;
  for (Index d : split.indices_of(Split::kTest)) {
    preds.push_back(all[static_cast<std::size_t>(d)]);
    golds.push_back(corpus.labels[static_cast<std::size_t>(d)]);
  }
  GcnRunResult out;
  out.test_metrics = compute_metrics(preds, golds, corpus.n_classes());
  out.params = std::move(trained.params);
  out.best_epoch = trained.best_epoch;
  out.history = std::move(trained.history);
  return out;
}

SparseX select_rows(const SparseX& m, const std::vector<Index>& rows) {
  std::vector<Triplet> triplets;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (SparseX::InnerIterator it(m, rows[k]); it; ++it) {
      triplets.emplace_back(static_cast<Index>(k), it.col(), it.value());
    }
  }
  SparseX out(static_cast<Index>(rows.size()), m.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

DenseX select_rows(const DenseX& m, const std::vector<Index>& rows) {
  DenseX out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Index>(k)) = m.row(rows[k]);
  }
  return out;
}

template <typename XMat>
Metrics run_logreg_baseline(const XMat& features, const ProcessedCorpus& corpus,
                            const SplitAssignment& split, const std::vector<char>& labelled_docs,
                            double lambda, std::uint64_t seed) {
  std::vector<Index> train_idx;
  std::vector<int> train_labels;
  for (std::size_t d = 0; d < labelled_docs.size(); ++d) {
    if (labelled_docs[d]) {
      train_idx.push_back(static_cast<Index>(d));
      train_labels.push_back(corpus.labels[d]);
    }
  }
  const auto params = train_logreg(select_rows(features, train_idx), train_labels,
                                   corpus.n_classes(), lambda, seed);
  const std::vector<Index> test_idx = split.indices_of(Split::kTest);
  const std::vector<int> preds = predict(params, select_rows(features, test_idx));
  std::vector<int> golds;
  for (Index d : test_idx) golds.push_back(corpus.labels[static_cast<std::size_t>(d)]);
  return compute_metrics(preds, golds, corpus.n_classes());
}

template Metrics run_logreg_baseline<SparseX>(const SparseX&, const ProcessedCorpus&,
                                              const SplitAssignment&, const std::vector<char>&,
                                              double, std::uint64_t);
template Metrics run_logreg_baseline<DenseX>(const DenseX&, const ProcessedCorpus&,
                                             const SplitAssignment&, const std::vector<char>&,
                                             double, std::uint64_t);

namespace {

// Doc-vector / word-vector training with a per-(config, seed) disk cache so
// sweeps and reruns reuse the expensive part.
EmbeddingTable ensure_embeddings(const RunConfig& config, const ProcessedCorpus& corpus,
                                 const std::string& algo, std::uint64_t seed) {
  const auto dir = config.workdir / "embeddings" / embed_key(config);
  const auto path = dir / (algo + "_seed" + std::to_string(seed) + ".vec");
  const auto kind =
      algo == "skipgram" ? EmbeddingTable::Kind::kWord : EmbeddingTable::Kind::kDocument;
  if (std::filesystem::exists(path)) {
    return EmbeddingTable::load(path, kind);
  }
  EmbeddingTrainConfig ec = config.embed;
  EmbeddingTable table;
  if (algo == "skipgram") {
    table = train_skipgram(corpus, ec, seed);
  } else if (algo == "pvdbow") {
    table = train_pvdbow(corpus, ec, seed);
  } else if (algo == "pvdm") {
    ec.initial_step = 0.05;  // distributed-memory variant trains with a larger step
    table = train_pvdm(corpus, ec, seed);
  } else {
    throw std::logic_error("ensure_embeddings: unknown algorithm " + algo);
  }
  std::filesystem::create_directories(dir);
  table.save(path);
  return table;
}

DenseX averaged_embedding_features(const ProcessedCorpus& corpus, const EmbeddingTable& table) {
  DenseX x(corpus.n_docs(), table.dim);
  for (Index d = 0; d < corpus.n_docs(); ++d) {
    x.row(d) = average_document_embedding(corpus.documents[static_cast<std::size_t>(d)], table,
                                          corpus.vocabulary)
                   .transpose();
  }
  return x;
}

struct ModelRunner {
  std::function<Metrics(std::uint64_t)> run;
  // set for GCN models so cmd_train can persist checkpoints
  std::shared_ptr<std::map<std::uint64_t, GcnRunResult>> gcn_results;
};

// mask_per_seed: redraw the labelled subset from the run seed (sweep
// behavior); otherwise the fixed split-seed mask is shared by all runs.
// The config / corpus / graph objects must outlive the returned runner.
ModelRunner make_runner(const RunConfig& config, ModelKind kind, const LoadedCorpus& lc,
                        const HeteroGraph* graph, double proportion, bool mask_per_seed) {
  const RunConfig* cfg = &config;
  const ProcessedCorpus* corpus = &lc.corpus;
  const SplitAssignment* split = &lc.split;
  const auto fixed_mask = mask_per_seed ? std::vector<char>{}
                                        : labelled_doc_mask(*split, proportion, cfg->split_seed);
  const auto mask_for = [split, proportion, mask_per_seed, fixed_mask](std::uint64_t seed) {
    return mask_per_seed ? labelled_doc_mask(*split, proportion, seed) : fixed_mask;
  };

  ModelRunner runner;
  switch (kind) {
    case ModelKind::kTextGcn:
    case ModelKind::kTextGcnT2v: {
      if (graph == nullptr) {
        throw std::logic_error("make_runner: GCN models need a graph");
      }
      runner.gcn_results = std::make_shared<std::map<std::uint64_t, GcnRunResult>>();
      auto results = runner.gcn_results;
      auto mutex = std::make_shared<std::mutex>();
      const bool t2v = kind == ModelKind::kTextGcnT2v;
      runner.run = [cfg, corpus, split, graph, results, mutex, mask_for,
                    t2v](std::uint64_t seed) {
        NodeFeatures features;
        if (t2v) {
          const EmbeddingTable words = ensure_embeddings(*cfg, *corpus, "skipgram", seed);
          const EmbeddingTable docs = ensure_embeddings(*cfg, *corpus, "pvdbow", seed);
          features = make_t2v_features(*graph, words, docs, corpus->vocabulary, corpus->doc_ids);
        } else {
          features = make_onehot_features(*graph);
        }
        auto result =
            run_gcn_once(*corpus, *split, *graph, features, mask_for(seed), cfg->train, seed);
        const Metrics metrics = result.test_metrics;
        {
          const std::lock_guard<std::mutex> lock(*mutex);
          (*results)[seed] = std::move(result);
        }
        return metrics;
      };
      break;
    }
    case ModelKind::kTfidf:
    case ModelKind::kCounts: {
      auto x = std::make_shared<SparseX>(kind == ModelKind::kTfidf
                                             ? tfidf_matrix(corpus->documents, corpus->vocabulary)
                                             : term_count_matrix(corpus->documents,
                                                                 corpus->vocabulary));
      runner.run = [cfg, corpus, split, x, mask_for](std::uint64_t seed) {
        return run_logreg_baseline(*x, *corpus, *split, mask_for(seed), cfg->logreg_lambda, seed);
      };
      break;
    }
    case ModelKind::kAvgEmbed: {
      if (!config.pretrained_embeddings) {
        throw std::invalid_argument("avg-embed needs --embeddings <pretrained word vectors>");
      }
      auto x = std::make_shared<DenseX>(averaged_embedding_features(
          *corpus, load_pretrained(*config.pretrained_embeddings)));
      runner.run = [cfg, corpus, split, x, mask_for](std::uint64_t seed) {
        return run_logreg_baseline(*x, *corpus, *split, mask_for(seed), cfg->logreg_lambda, seed);
      };
      break;
    }
    case ModelKind::kPvdbow:
    case ModelKind::kPvdm: {
      const std::string algo = kind == ModelKind::kPvdbow ? "pvdbow" : "pvdm";
      runner.run = [cfg, corpus, split, algo, mask_for](std::uint64_t seed) {
        const EmbeddingTable docs = ensure_embeddings(*cfg, *corpus, algo, seed);
        return run_logreg_baseline(docs.vectors, *corpus, *split, mask_for(seed),
                                   cfg->logreg_lambda, seed);
      };
      break;
    }
  }
  return runner;
}

std::string run_key(const RunConfig& config, ModelKind kind) {
  Hasher h;
  h.str("run");
  h.str(preprocess_key(config));
  h.str(model_name(kind));
  if (is_gcn_model(kind)) h.str(graph_key(config));
  if (kind == ModelKind::kTextGcnT2v || kind == ModelKind::kPvdbow || kind == ModelKind::kPvdm) {
    h.str(embed_key(config));
  }
  if (kind == ModelKind::kAvgEmbed && config.pretrained_embeddings) {
    h.file(*config.pretrained_embeddings);
  }
  h.f64(config.train.learning_rate);
  h.i32(config.train.max_epochs);
  h.f64(config.train.dropout);
  h.u64(static_cast<std::uint64_t>(config.train.hidden));
  h.f64(config.logreg_lambda);
  h.f64(config.label_proportion);
  h.u64(config.split_seed);
  for (auto s : config.seeds) h.u64(s);
  return h.hex();
}

void log_report(const ExperimentReport& report, std::ostream& log) {
  const auto acc = report.accuracy();
  const auto f1 = report.macro_f1();
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%s: accuracy %.4f +- %.4f, macro F1 %.4f +- %.4f (%zu seed%s, %.1fs)",
                report.model.c_str(), acc.mean, acc.stddev, f1.mean, f1.stddev,
                report.seeds.size(), report.seeds.size() == 1 ? "" : "s", report.runtime_s);
  log << buf << '\n';
}

}  // namespace

std::filesystem::path cmd_train(const RunConfig& config, std::ostream& log) {
  const ModelKind kind = parse_model(config.model);
  const LoadedCorpus lc = load_preprocess_artifacts(config);

  HeteroGraph graph;
  const HeteroGraph* graph_ptr = nullptr;
  if (is_gcn_model(kind)) {
    const GraphPaths gp = graph_paths(config);
    require_file(gp.coo_file, "build-graph");
    require_file(gp.sidecar_file, "build-graph");
    graph = load_graph(gp.coo_file, gp.sidecar_file);
    graph_ptr = &graph;
  }

  const auto run_dir = config.workdir / "runs" / (model_name(kind) + "-" + run_key(config, kind));
  const ModelRunner runner =
      make_runner(config, kind, lc, graph_ptr, config.label_proportion, false);
  const auto cfg_json = config_snapshot(config, model_name(kind), config.label_proportion,
                                        "fixed");
  ExperimentReport report;
  try {
    report = run_seeded(model_name(kind), cfg_json, config.seeds, runner.run, config.jobs);
  } catch (RunSeededError& e) {
    emit_report({e.partial_results}, run_dir);  // partial results preserved
    throw;
  }
  emit_report({report}, run_dir);

  if (runner.gcn_results) {
    for (const auto& [seed, result] : *runner.gcn_results) {
      nlohmann::json meta = cfg_json;
      meta["seed"] = seed;
      meta["best_epoch"] = result.best_epoch;
      save_checkpoint(run_dir / ("checkpoint_seed" + std::to_string(seed) + ".ckpt"),
                      result.params, meta);
    }
  }
  log_report(report, log);
  log << "train: wrote " << run_dir.string() << "\n";
  return run_dir;
}

std::filesystem::path cmd_sweep(const RunConfig& config, const SweepSpec& spec,
                                std::ostream& log) {
  const LoadedCorpus lc = load_preprocess_artifacts(config);
  std::vector<SweepPoint> points;
  std::vector<ExperimentReport> all_reports;

  Hasher h;
  h.str("sweep");
  h.str(preprocess_key(config));
  h.str(config.model);

  if (spec.kind == SweepKind::kWindow) {
    const ModelKind kind = parse_model(config.model);
    if (!is_gcn_model(kind)) {
      throw std::invalid_argument("sweep window: only GCN models vary with the window (got '" +
                                  config.model + "')");
    }
    if (spec.sizes.empty() && !spec.include_no_ppmi) {
      throw std::invalid_argument("sweep window: empty size grid");
    }
    struct Setting {
      int window;
      bool use_ppmi;
    };
    std::vector<Setting> settings;
    for (int s : spec.sizes) {
      if (s < 1) throw std::invalid_argument("sweep window: sizes must be >= 1");
      settings.push_back({s, true});
      h.i32(s);
    }
    if (spec.include_no_ppmi) {
      settings.push_back({config.window_size, false});
      h.str("no-ppmi");
    }
    for (const auto& setting : settings) {
      RunConfig pc = config;
      pc.window_size = setting.window;
      pc.use_ppmi = setting.use_ppmi;
      const GraphPaths gp = cmd_build_graph(pc, log);
      const HeteroGraph graph = load_graph(gp.coo_file, gp.sidecar_file);
      const ModelRunner runner =
          make_runner(pc, kind, lc, &graph, pc.label_proportion, false);
      auto cfg_json = config_snapshot(pc, model_name(kind), pc.label_proportion, "fixed");
      ExperimentReport report =
          run_seeded(model_name(kind), cfg_json, pc.seeds, runner.run, pc.jobs);
      const double x = setting.use_ppmi ? static_cast<double>(setting.window) : 0.0;
      log << "window " << (setting.use_ppmi ? std::to_string(setting.window) : "none") << ": ";
      log_report(report, log);
      points.push_back({x, {report}});
      all_reports.push_back(std::move(report));
    }
  } else {
    if (spec.proportions.empty()) {
      throw std::invalid_argument("sweep labels: empty proportion grid");
    }
    for (double p : spec.proportions) {
      if (!(p > 0.0) || p > 1.0) {
        throw std::invalid_argument("sweep labels: proportions must be in (0, 1]");
      }
      h.f64(p);
    }
    const auto names = split_list(config.model);
    if (names.empty()) {
      throw std::invalid_argument("sweep labels: no models given");
    }
    std::vector<ModelKind> kinds;
    for (const auto& name : names) kinds.push_back(parse_model(name));

    HeteroGraph graph;
    const HeteroGraph* graph_ptr = nullptr;
    if (std::any_of(kinds.begin(), kinds.end(), is_gcn_model)) {
      const GraphPaths gp = graph_paths(config);
      require_file(gp.coo_file, "build-graph");
      require_file(gp.sidecar_file, "build-graph");
      graph = load_graph(gp.coo_file, gp.sidecar_file);
      graph_ptr = &graph;
    }
    for (double p : spec.proportions) {
      SweepPoint point;
      point.x = 100.0 * p;  // percent of train labels
      for (ModelKind kind : kinds) {
        const ModelRunner runner = make_runner(config, kind, lc, graph_ptr, p, true);
        auto cfg_json = config_snapshot(config, model_name(kind), p, "per-seed");
        ExperimentReport report =
            run_seeded(model_name(kind), cfg_json, config.seeds, runner.run, config.jobs);
        log << "labels " << point.x << "%: ";
        log_report(report, log);
        point.reports.push_back(report);
        all_reports.push_back(std::move(report));
      }
      points.push_back(std::move(point));
    }
  }

  const std::string kind_name = spec.kind == SweepKind::kWindow ? "window" : "labels";
  const auto dir = config.workdir / "sweeps" / (kind_name + "-" + h.hex());
  emit_report(all_reports, dir);
  emit_plotdata(kind_name, points, dir);
  log << "sweep: wrote " << dir.string() << "\n";
  return dir;
}

}  // namespace textgraph
