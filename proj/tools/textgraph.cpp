#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "textgraph/pipeline.hpp"

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoull(item));
  }
  if (out.empty()) {
    throw CLI::ValidationError("--seeds", "empty seed list");
  }
  return out;
}

std::vector<double> parse_percent_list(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item) / 100.0);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

struct CliFlags {
  textgraph::RunConfig config;
  std::string seeds = "0,1,2,3,4";
  std::string stemmer_table, stopwords, embeddings;

  void resolve() {
    config.seeds = parse_seed_list(seeds);
    if (!stemmer_table.empty()) config.stemmer_table = stemmer_table;
    if (!stopwords.empty()) config.stopwords = stopwords;
    if (!embeddings.empty()) config.pretrained_embeddings = embeddings;
    if (config.workdir.empty()) {
      const char* env = std::getenv("TEXTGRAPH_WORKDIR");
      config.workdir = env != nullptr ? env : "textgraph_workdir";
    }
  }
};

void add_common_options(CLI::App* cmd, CliFlags& f) {
  cmd->add_option("--dataset", f.config.dataset,
                  "Input dataset (CSV with id,content,category header, or JSON-lines)")
      ->required();
  cmd->add_option("--workdir", f.config.workdir,
                  "Artifact cache directory (default: $TEXTGRAPH_WORKDIR or ./textgraph_workdir)");
  cmd->add_option("--stemmer-table", f.stemmer_table, "token<TAB>stem TSV (default: identity)");
  cmd->add_option("--stopwords", f.stopwords,
                  "Stopword file, one token per line (default: built-in Swahili list)");
  cmd->add_option("--split-seed", f.config.split_seed, "Corpus shuffle seed (default 0)");
  cmd->add_option("--label-proportion", f.config.label_proportion,
                  "Fraction of train documents whose labels are visible (default 0.20)")
      ->check(CLI::Range(1e-9, 1.0));
}

void add_graph_options(CLI::App* cmd, CliFlags& f) {
  cmd->add_option("--window", f.config.window_size, "Co-occurrence window size (default 30)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag_callback("--no-ppmi", [&f] { f.config.use_ppmi = false; },
                         "Omit word-word edges entirely");
}

void add_train_options(CLI::App* cmd, CliFlags& f) {
  cmd->add_option("--model", f.config.model,
                  "textgcn | textgcn-t2v | tfidf | counts | avg-embed | pvdbow | pvdm");
  cmd->add_option("--seeds", f.seeds, "Comma-separated seed list (default 0,1,2,3,4)");
  cmd->add_option("--epochs", f.config.train.max_epochs, "GCN training epochs (default 100)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--lr", f.config.train.learning_rate, "Adam learning rate (default 0.02)");
  cmd->add_option("--hidden", f.config.train.hidden, "Hidden layer width (default 200)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--dropout", f.config.train.dropout, "Dropout rate (default 0.5)")
      ->check(CLI::Range(0.0, 0.999));
  cmd->add_option("--lambda", f.config.logreg_lambda,
                  "L2 strength for the logistic-regression baselines (default 1e-4)");
  cmd->add_option("--embeddings", f.embeddings,
                  "Pretrained word-vector file (required for avg-embed)");
  cmd->add_option("--embed-epochs", f.config.embed.epochs,
                  "word2vec/doc2vec training epochs (default 20)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--embed-dim", f.config.embed.dimension,
                  "word2vec/doc2vec dimension (default 300)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--embed-workers", f.config.embed.workers,
                  "Embedding trainer threads; >1 trades determinism for speed (default 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", f.config.jobs, "Parallel seed runs (default 1)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous text-graph pipeline: preprocessing, graph construction, "
               "GCN training and baseline sweeps"};
  app.require_subcommand(1);

  CliFlags flags;
  std::string sweep_kind;
  std::string proportions = "1,5,10,20";
  std::string sizes;
  bool include_no_ppmi = false;

  CLI::App* prep = app.add_subcommand("preprocess", "Clean, tokenize, stem and split the corpus");
  add_common_options(prep, flags);

  CLI::App* build = app.add_subcommand(
      "build-graph", "Assemble and normalize the document-word graph from preprocess artifacts");
  add_common_options(build, flags);
  add_graph_options(build, flags);

  CLI::App* train = app.add_subcommand("train", "Train a model across seeds and report metrics");
  add_common_options(train, flags);
  add_graph_options(train, flags);
  add_train_options(train, flags);

  CLI::App* sweep =
      app.add_subcommand("sweep", "Window-size or label-proportion experiment sweeps");
  add_common_options(sweep, flags);
  add_graph_options(sweep, flags);
  add_train_options(sweep, flags);
  sweep->add_option("--sweep", sweep_kind, "labels | window")->required();
  sweep->add_option("--proportions", proportions,
                    "Comma-separated label percentages for --sweep labels (default 1,5,10,20)");
  sweep->add_option("--sizes", sizes, "Comma-separated window sizes for --sweep window");
  sweep->add_flag("--include-no-ppmi", include_no_ppmi,
                  "Add a no-word-word-edges setting to the window sweep");

  CLI11_PARSE(app, argc, argv);

  try {
    flags.resolve();
    const textgraph::RunConfig& config = flags.config;
    if (prep->parsed()) {
      textgraph::cmd_preprocess(config, std::cout);
    } else if (build->parsed()) {
      textgraph::cmd_build_graph(config, std::cout);
    } else if (train->parsed()) {
      textgraph::cmd_train(config, std::cout);
    } else if (sweep->parsed()) {
      textgraph::SweepSpec spec;
      if (sweep_kind == "labels") {
        spec.kind = textgraph::SweepKind::kLabels;
        spec.proportions = parse_percent_list(proportions);
      } else if (sweep_kind == "window") {
        spec.kind = textgraph::SweepKind::kWindow;
        spec.sizes = parse_int_list(sizes);
        spec.include_no_ppmi = include_no_ppmi;
      } else {
        throw std::invalid_argument("--sweep must be 'labels' or 'window'");
      }
      textgraph::cmd_sweep(config, spec, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
