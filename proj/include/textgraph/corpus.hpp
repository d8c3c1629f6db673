#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "textgraph/types.hpp"

namespace textgraph {

struct RawDocument {
  std::string id;
  std::string content;
  std::string category;
};

/// Token -> stem mapping. Implementations must be deterministic and return
/// non-empty stems; stem_corpus treats an exception or an empty result as a
/// failure and passes the token through unchanged.
class Stemmer {
 public:
  virtual ~Stemmer() = default;
  virtual std::string stem(const std::string& token) const = 0;
};

class IdentityStemmer final : public Stemmer {
 public:
  std::string stem(const std::string& token) const override { return token; }
};

/// Lookup-table stemmer fed from a "token<TAB>stem" TSV, so output of an
/// external morphological analyzer can be injected offline. Tokens absent
/// from the table pass through unchanged.
class TableStemmer final : public Stemmer {
 public:
  static TableStemmer load(const std::filesystem::path& path);
  std::string stem(const std::string& token) const override;
  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, std::string> table_;
};

class Vocabulary {
 public:
  /// Ids are assigned in first-occurrence order over the corpus. Throws on an
  /// empty corpus (no documents or no tokens at all).
  static Vocabulary build(const std::vector<std::vector<std::string>>& documents);

  Index size() const { return static_cast<Index>(tokens_.size()); }
  std::optional<Index> id_of(const std::string& token) const;
  const std::string& token(Index id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::int64_t frequency(Index id) const { return freq_.at(static_cast<std::size_t>(id)); }
  std::int64_t doc_frequency(Index id) const { return doc_freq_.at(static_cast<std::size_t>(id)); }

  /// TSV artifact: token<TAB>id<TAB>frequency<TAB>doc_frequency, id-ordered.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::unordered_map<std::string, Index> ids_;
  std::vector<std::string> tokens_;
  std::vector<std::int64_t> freq_;
  std::vector<std::int64_t> doc_freq_;
};

struct ProcessedCorpus {
  std::vector<std::string> doc_ids;
  std::vector<std::vector<Index>> documents;  // token ids, every document non-empty
  std::vector<int> labels;                    // class index in [0, C)
  std::vector<std::string> class_names;       // first-occurrence order
  Vocabulary vocabulary;

  Index n_docs() const { return static_cast<Index>(documents.size()); }
  int n_classes() const { return static_cast<int>(class_names.size()); }

  /// The vocabulary is its own TSV artifact; the corpus file stores
  /// documents, labels and class names only.
  void save(const std::filesystem::path& path) const;
  static ProcessedCorpus load(const std::filesystem::path& path, Vocabulary vocabulary);
};

enum class Split : std::uint8_t { kTrain = 0, kValidation = 1, kTest = 2 };

struct SplitAssignment {
  std::vector<Split> split;     // per document
  std::vector<char> labelled;   // true only on train documents

  std::vector<Index> indices_of(Split s) const;
  Index count_of(Split s) const;

  /// CSV artifact: doc_id,split,labelled.
  void save(const std::filesystem::path& path, const std::vector<std::string>& doc_ids) const;
  static SplitAssignment load(const std::filesystem::path& path,
                              const std::vector<std::string>& doc_ids);
};

// --- preprocessing pipeline ---------------------------------------------

/// Lowercase, transliterate to ASCII (compatibility mappings plus combining
/// diacritic removal; unmappable codepoints dropped), drop whitespace-
/// delimited tokens that start with '@' or '#' or look like URLs
/// (http(s):// or www. prefixes), collapse whitespace, trim. Total and
/// idempotent.
std::string clean_text(std::string_view raw);

/// Split cleaned text on whitespace and punctuation boundaries, then drop
/// stopwords, single-character tokens and tokens containing any
/// non-alphabetic character.
std::vector<std::string> tokenize_and_filter(std::string_view text,
                                             const std::unordered_set<std::string>& stopwords);

/// Collapse laughter tokens (repeated ha/he/hi units, length >= 4) to
/// "laughter" and tokens made of one 2-4 letter unit repeated >= 2 times to
/// "onomatopoeia". Laughter wins when both match.
std::vector<std::string> normalize_special_tokens(std::vector<std::string> tokens);

struct StemReport {
  std::size_t stemmed = 0;
  std::size_t discarded = 0;  // tokens longer than 30 chars after stemming
  std::size_t warnings = 0;   // stemmer failures, token passed through
};

/// Stem tokens whose corpus-wide frequency is > 1; frequency-1 tokens stay
/// unstemmed. Any resulting token longer than 30 characters is discarded.
StemReport stem_corpus(std::vector<std::vector<std::string>>& documents, const Stemmer& stemmer);

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& documents);

/// Stratified 8:1:1 split: within each class, documents are shuffled by
/// `seed` and assigned contiguously with test = round(n/10),
/// validation = round((n - test)/9) (each at least 1), train = rest.
/// Requires >= 10 documents and >= 3 documents per class.
SplitAssignment split_corpus(const ProcessedCorpus& corpus, std::uint64_t seed);

/// Uniform sample without replacement of round(proportion * |train|) train
/// documents. Deterministic given seed; throws if the count comes out 0.
std::vector<char> select_labelled_subset(const SplitAssignment& assignment, double proportion,
                                         std::uint64_t seed);

struct PreprocessOptions {
  std::unordered_set<std::string> stopwords;  // used as given; may be empty
  const Stemmer* stemmer = nullptr;           // identity when null
};

struct PreprocessResult {
  ProcessedCorpus corpus;
  std::size_t dropped_empty = 0;  // documents with no tokens left
  StemReport stem;
};

/// Full cleaning pipeline: clean -> tokenize/filter -> special tokens ->
/// corpus-frequency stemming -> drop emptied documents -> vocabulary + ids.
PreprocessResult preprocess(const std::vector<RawDocument>& raw, const PreprocessOptions& options);

// --- dataset / artifact io ------------------------------------------------

/// CSV with header id,content,category (RFC-4180 quoting); errors carry the
/// 1-based row number.
std::vector<RawDocument> load_dataset_csv(const std::filesystem::path& path);
/// JSON-lines with the same field names.
std::vector<RawDocument> load_dataset_jsonl(const std::filesystem::path& path);
/// Dispatch on extension: .jsonl/.json -> JSON-lines, anything else CSV.
std::vector<RawDocument> load_dataset(const std::filesystem::path& path);

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);
/// Small built-in Swahili function-word list.
const std::unordered_set<std::string>& default_stopwords();

}  // namespace textgraph
