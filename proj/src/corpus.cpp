#include "textgraph/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace textgraph {

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

// Latin-1 supplement letters, indexed by codepoint - 0xC0. Lowercase targets;
// the caller lowercases ASCII anyway. Empty string = drop.
constexpr const char* kLatin1[64] = {
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o",  "",  "o", "u", "u", "u", "u", "y", "th", "ss",
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o",  "",  "o", "u", "u", "u", "u", "y", "th", "y"};

// Latin Extended-A, indexed by codepoint - 0x100.
constexpr const char* kLatinExtA[128] = {
    "a", "a", "a", "a", "a", "a",                                // 0100-0105
    "c", "c", "c", "c", "c", "c", "c", "c",                      // 0106-010D
    "d", "d", "d", "d",                                          // 010E-0111
    "e", "e", "e", "e", "e", "e", "e", "e", "e", "e",            // 0112-011B
    "g", "g", "g", "g", "g", "g", "g", "g",                      // 011C-0123
    "h", "h", "h", "h",                                          // 0124-0127
    "i", "i", "i", "i", "i", "i", "i", "i", "i", "i",            // 0128-0131
    "ij", "ij",                                                  // 0132-0133
    "j", "j",                                                    // 0134-0135
    "k", "k", "k",                                               // 0136-0138
    "l", "l", "l", "l", "l", "l", "l", "l", "l", "l",            // 0139-0142
    "n", "n", "n", "n", "n", "n", "n",                           // 0143-0149
    "n", "n",                                                    // 014A-014B
    "o", "o", "o", "o", "o", "o",                                // 014C-0151
    "oe", "oe",                                                  // 0152-0153
    "r", "r", "r", "r", "r", "r",                                // 0154-0159
    "s", "s", "s", "s", "s", "s", "s", "s",                      // 015A-0161
    "t", "t", "t", "t", "t", "t",                                // 0162-0167
    "u", "u", "u", "u", "u", "u", "u", "u", "u", "u", "u", "u",  // 0168-0173
    "w", "w",                                                    // 0174-0175
    "y", "y", "y",                                               // 0176-0178
    "z", "z", "z", "z", "z", "z",                                // 0179-017E
    "s"};                                                        // 017F

void append_ascii_lower(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    char c = static_cast<char>(cp);
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    out += c;
    return;
  }
  if (cp >= 0x300 && cp <= 0x36F) return;  // combining diacritics
  if (cp >= 0xFF01 && cp <= 0xFF5E) {      // fullwidth forms
    append_ascii_lower(out, cp - 0xFEE0);
    return;
  }
  if (cp >= 0xC0 && cp <= 0xFF) {
    out += kLatin1[cp - 0xC0];
    return;
  }
  if (cp >= 0x100 && cp <= 0x17F) {
    out += kLatinExtA[cp - 0x100];
    return;
  }
  switch (cp) {
    case 0xA0:
      out += ' ';
      return;
    case 0x2018:
    case 0x2019:
    case 0x201A:
    case 0x201B:
    case 0x2039:
    case 0x203A:
    case 0xB4:
    case 0x2BC:
      out += '\'';
      return;
    case 0x201C:
    case 0x201D:
    case 0x201E:
    case 0x201F:
    case 0xAB:
    case 0xBB:
      out += '"';
      return;
    case 0x2026:
      out += "...";
      return;
    default:
      break;
  }
  if (cp >= 0x2000 && cp <= 0x200A) {
    out += ' ';
    return;
  }
  if (cp >= 0x2010 && cp <= 0x2015) {
    out += '-';
    return;
  }
  // unmappable: dropped
}

// Decode one UTF-8 codepoint at raw[i]; advances i. Invalid bytes are skipped.
bool next_codepoint(std::string_view raw, std::size_t& i, char32_t& cp) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(raw[k]); };
  while (i < raw.size()) {
    const unsigned char b0 = byte(i);
    int len = 0;
    char32_t v = 0;
    if (b0 < 0x80) {
      len = 1;
      v = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      v = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      v = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      v = b0 & 0x07;
    } else {
      ++i;  // stray continuation or invalid lead byte
      continue;
    }
    if (i + static_cast<std::size_t>(len) > raw.size()) {
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      if ((byte(i + static_cast<std::size_t>(k)) & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      v = (v << 6) | (byte(i + static_cast<std::size_t>(k)) & 0x3F);
    }
    if (!ok) {
      ++i;
      continue;
    }
    i += static_cast<std::size_t>(len);
    cp = v;
    return true;
  }
  return false;
}

bool is_meta_token(std::string_view tok) {
  return tok.starts_with("@") || tok.starts_with("#") || tok.starts_with("http://") ||
         tok.starts_with("https://") || tok.starts_with("www.");
}

bool is_laughter(const std::string& t) {
  if (t.size() < 4 || t.size() % 2 != 0) return false;
  for (std::size_t i = 0; i < t.size(); i += 2) {
    if (t[i] != 'h') return false;
    const char v = t[i + 1];
    if (v != 'a' && v != 'e' && v != 'i') return false;
  }
  return true;
}

bool is_onomatopoeia(const std::string& t) {
  for (char c : t) {
    if (!is_ascii_alpha(c)) return false;
  }
  for (std::size_t unit = 2; unit <= 4; ++unit) {
    if (t.size() < 2 * unit || t.size() % unit != 0) continue;
    bool repeats = true;
    for (std::size_t i = unit; i < t.size() && repeats; ++i) {
      repeats = t[i] == t[i - unit];
    }
    if (repeats) return true;
  }
  return false;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_ascii_space(s[b])) ++b;
  while (e > b && is_ascii_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string clean_text(std::string_view raw) {
  std::string ascii;
  ascii.reserve(raw.size());
  std::size_t i = 0;
  char32_t cp = 0;
  while (next_codepoint(raw, i, cp)) {
    append_ascii_lower(ascii, cp);
  }

  std::string out;
  out.reserve(ascii.size());
  std::size_t p = 0;
  while (p < ascii.size()) {
    while (p < ascii.size() && is_ascii_space(ascii[p])) ++p;
    const std::size_t start = p;
    while (p < ascii.size() && !is_ascii_space(ascii[p])) ++p;
    if (p == start) break;
    const std::string_view tok(ascii.data() + start, p - start);
    if (is_meta_token(tok)) continue;
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

std::vector<std::string> tokenize_and_filter(std::string_view text,
                                             const std::unordered_set<std::string>& stopwords) {
  std::vector<std::string> out;
  std::string cur;
  bool non_alpha = false;
  const auto flush = [&] {
    if (!cur.empty()) {
      if (cur.size() >= 2 && !non_alpha && stopwords.find(cur) == stopwords.end()) {
        out.push_back(cur);
      }
      cur.clear();
    }
    non_alpha = false;
  };
  for (char c : text) {
    if (is_ascii_alpha(c) || is_ascii_digit(c)) {
      non_alpha |= !is_ascii_alpha(c);
      cur += c;
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::vector<std::string> normalize_special_tokens(std::vector<std::string> tokens) {
  for (auto& t : tokens) {
    if (is_laughter(t)) {
      t = "laughter";
    } else if (is_onomatopoeia(t)) {
      t = "onomatopoeia";
    }
  }
  return tokens;
}

StemReport stem_corpus(std::vector<std::vector<std::string>>& documents, const Stemmer& stemmer) {
  std::unordered_map<std::string, std::int64_t> freq;
  for (const auto& doc : documents) {
    for (const auto& tok : doc) ++freq[tok];
  }
  StemReport report;
  for (auto& doc : documents) {
    std::vector<std::string> kept;
    kept.reserve(doc.size());
    for (auto& tok : doc) {
      std::string result = tok;
      if (freq[tok] > 1) {
        try {
          std::string s = stemmer.stem(tok);
          if (s.empty()) {
            ++report.warnings;
          } else {
            if (s != tok) ++report.stemmed;
            result = std::move(s);
          }
        } catch (const std::exception&) {
          ++report.warnings;
        }
      }
      if (result.size() > 30) {
        ++report.discarded;
        continue;
      }
      kept.push_back(std::move(result));
    }
    doc = std::move(kept);
  }
  return report;
}

// --- TableStemmer ----------------------------------------------------------

TableStemmer TableStemmer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("stemmer table: cannot open " + path.string());
  }
  TableStemmer st;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw std::runtime_error("stemmer table: malformed line " + std::to_string(line_no) +
                               " in " + path.string());
    }
    st.table_[line.substr(0, tab)] = trim(line.substr(tab + 1));
  }
  return st;
}

std::string TableStemmer::stem(const std::string& token) const {
  const auto it = table_.find(token);
  return it == table_.end() ? token : it->second;
}

// --- Vocabulary ------------------------------------------------------------

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& documents) {
  if (documents.empty()) {
    throw std::invalid_argument("build_vocabulary: empty corpus");
  }
  Vocabulary v;
  std::vector<Index> seen_in_doc;
  for (const auto& doc : documents) {
    seen_in_doc.clear();
    for (const auto& tok : doc) {
      auto [it, inserted] = v.ids_.try_emplace(tok, static_cast<Index>(v.tokens_.size()));
      if (inserted) {
        v.tokens_.push_back(tok);
        v.freq_.push_back(0);
        v.doc_freq_.push_back(0);
      }
      const Index id = it->second;
      ++v.freq_[static_cast<std::size_t>(id)];
      seen_in_doc.push_back(id);
    }
    std::sort(seen_in_doc.begin(), seen_in_doc.end());
    seen_in_doc.erase(std::unique(seen_in_doc.begin(), seen_in_doc.end()), seen_in_doc.end());
    for (Index id : seen_in_doc) ++v.doc_freq_[static_cast<std::size_t>(id)];
  }
  if (v.tokens_.empty()) {
    throw std::invalid_argument("build_vocabulary: corpus has no tokens");
  }
  return v;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& documents) {
  return Vocabulary::build(documents);
}

std::optional<Index> Vocabulary::id_of(const std::string& token) const {
  const auto it = ids_.find(token);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("vocabulary: cannot open " + path.string() + " for writing");
  }
  for (std::size_t id = 0; id < tokens_.size(); ++id) {
    out << tokens_[id] << '\t' << id << '\t' << freq_[id] << '\t' << doc_freq_[id] << '\n';
  }
  if (!out) {
    throw std::runtime_error("vocabulary: write failed for " + path.string());
  }
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("vocabulary: cannot open " + path.string());
  }
  Vocabulary v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    long long id = -1, freq = 0, df = 0;
    if (!std::getline(ss, token, '\t') || !(ss >> id >> freq >> df) ||
        id != static_cast<long long>(v.tokens_.size())) {
      throw std::runtime_error("vocabulary: malformed line " + std::to_string(line_no) + " in " +
                               path.string());
    }
    v.ids_.emplace(token, static_cast<Index>(id));
    v.tokens_.push_back(std::move(token));
    v.freq_.push_back(freq);
    v.doc_freq_.push_back(df);
  }
  if (v.tokens_.empty()) {
    throw std::runtime_error("vocabulary: " + path.string() + " is empty");
  }
  return v;
}

// --- ProcessedCorpus -------------------------------------------------------

void ProcessedCorpus::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("corpus: cannot open " + path.string() + " for writing");
  }
  out << "textgraph-corpus 1\n";
  out << documents.size() << ' ' << class_names.size() << '\n';
  for (const auto& name : class_names) out << name << '\n';
  for (std::size_t d = 0; d < documents.size(); ++d) {
    if (doc_ids[d].find_first_of("\t\n") != std::string::npos) {
      throw std::runtime_error("corpus: document id contains tab/newline: " + doc_ids[d]);
    }
    out << doc_ids[d] << '\t' << labels[d] << '\t';
    for (std::size_t k = 0; k < documents[d].size(); ++k) {
      if (k) out << ' ';
      out << documents[d][k];
    }
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("corpus: write failed for " + path.string());
  }
}

ProcessedCorpus ProcessedCorpus::load(const std::filesystem::path& path, Vocabulary vocabulary) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("corpus: cannot open " + path.string());
  }
  std::string magic;
  int version = 0;
  std::size_t n_docs = 0, n_classes = 0;
  in >> magic >> version >> n_docs >> n_classes;
  if (!in || magic != "textgraph-corpus" || version != 1) {
    throw std::runtime_error("corpus: bad header in " + path.string());
  }
  in.ignore();
  ProcessedCorpus corpus;
  corpus.vocabulary = std::move(vocabulary);
  corpus.class_names.resize(n_classes);
  for (auto& name : corpus.class_names) {
    if (!std::getline(in, name) || name.empty()) {
      throw std::runtime_error("corpus: truncated class list in " + path.string());
    }
  }
  const Index vocab_size = corpus.vocabulary.size();
  std::string line;
  for (std::size_t d = 0; d < n_docs; ++d) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("corpus: truncated document list in " + path.string());
    }
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw std::runtime_error("corpus: malformed document record " + std::to_string(d + 1));
    }
    corpus.doc_ids.push_back(line.substr(0, tab1));
    const int label = std::stoi(line.substr(tab1 + 1, tab2 - tab1 - 1));
    if (label < 0 || label >= static_cast<int>(n_classes)) {
      throw std::runtime_error("corpus: label out of range in record " + std::to_string(d + 1));
    }
    corpus.labels.push_back(label);
    std::istringstream ids(line.substr(tab2 + 1));
    std::vector<Index> doc;
    long long id = 0;
    while (ids >> id) {
      if (id < 0 || id >= vocab_size) {
        throw std::runtime_error("corpus: token id out of range in record " +
                                 std::to_string(d + 1));
      }
      doc.push_back(static_cast<Index>(id));
    }
    if (doc.empty()) {
      throw std::runtime_error("corpus: empty document in record " + std::to_string(d + 1));
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

// --- splits ----------------------------------------------------------------

std::vector<Index> SplitAssignment::indices_of(Split s) const {
  std::vector<Index> out;
  for (std::size_t d = 0; d < split.size(); ++d) {
    if (split[d] == s) out.push_back(static_cast<Index>(d));
  }
  return out;
}

Index SplitAssignment::count_of(Split s) const {
  return static_cast<Index>(std::count(split.begin(), split.end(), s));
}

namespace {
const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "?";
}
}  // namespace

void SplitAssignment::save(const std::filesystem::path& path,
                           const std::vector<std::string>& doc_ids) const {
  if (doc_ids.size() != split.size()) {
    throw std::invalid_argument("splits: doc id count mismatch");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("splits: cannot open " + path.string() + " for writing");
  }
  out << "doc_id,split,labelled\n";
  for (std::size_t d = 0; d < split.size(); ++d) {
    out << doc_ids[d] << ',' << split_name(split[d]) << ',' << (labelled[d] ? 1 : 0) << '\n';
  }
  if (!out) {
    throw std::runtime_error("splits: write failed for " + path.string());
  }
}

SplitAssignment SplitAssignment::load(const std::filesystem::path& path,
                                      const std::vector<std::string>& doc_ids) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("splits: cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || trim(line) != "doc_id,split,labelled") {
    throw std::runtime_error("splits: bad header in " + path.string());
  }
  SplitAssignment a;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw std::runtime_error("splits: malformed row " + std::to_string(row));
    }
    const std::string id = line.substr(0, c1);
    const std::string tag = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string lab = trim(line.substr(c2 + 1));
    const std::size_t d = a.split.size();
    if (d >= doc_ids.size() || id != doc_ids[d]) {
      throw std::runtime_error("splits: row " + std::to_string(row) +
                               " does not match corpus document order");
    }
    Split s;
    if (tag == "train") {
      s = Split::kTrain;
    } else if (tag == "validation") {
      s = Split::kValidation;
    } else if (tag == "test") {
      s = Split::kTest;
    } else {
      throw std::runtime_error("splits: unknown split tag '" + tag + "' at row " +
                               std::to_string(row));
    }
    a.split.push_back(s);
    a.labelled.push_back(lab == "1" ? 1 : 0);
  }
  if (a.split.size() != doc_ids.size()) {
    throw std::runtime_error("splits: " + path.string() + " has " +
                             std::to_string(a.split.size()) + " rows, corpus has " +
                             std::to_string(doc_ids.size()));
  }
  return a;
}

SplitAssignment split_corpus(const ProcessedCorpus& corpus, std::uint64_t seed) {
  const Index n = corpus.n_docs();
  if (n < 10) {
    throw std::invalid_argument("split_corpus: need at least 10 documents, have " +
                                std::to_string(n));
  }
  const int n_classes = corpus.n_classes();
  std::vector<std::vector<Index>> by_class(static_cast<std::size_t>(n_classes));
  for (Index d = 0; d < n; ++d) {
    by_class[static_cast<std::size_t>(corpus.labels[static_cast<std::size_t>(d)])].push_back(d);
  }

  SplitAssignment a;
  a.split.assign(static_cast<std::size_t>(n), Split::kTrain);
  a.labelled.assign(static_cast<std::size_t>(n), 0);

  RandomSource rng = RandomSource(seed).substream("split");
  for (int c = 0; c < n_classes; ++c) {
    auto& docs = by_class[static_cast<std::size_t>(c)];
    if (docs.size() < 3) {
      throw std::invalid_argument("split_corpus: class '" +
                                  corpus.class_names[static_cast<std::size_t>(c)] +
                                  "' has fewer than 3 documents");
    }
    rng.shuffle(docs);
    const double nc = static_cast<double>(docs.size());
    const auto n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(nc / 10.0)));
    const auto n_val = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround((nc - static_cast<double>(n_test)) / 9.0)));
    const std::size_t n_train = docs.size() - n_test - n_val;
    for (std::size_t k = 0; k < docs.size(); ++k) {
      const auto d = static_cast<std::size_t>(docs[k]);
      if (k < n_train) {
        a.split[d] = Split::kTrain;
      } else if (k < n_train + n_val) {
        a.split[d] = Split::kValidation;
      } else {
        a.split[d] = Split::kTest;
      }
    }
  }
  return a;
}

std::vector<char> select_labelled_subset(const SplitAssignment& assignment, double proportion,
                                         std::uint64_t seed) {
  if (!(proportion > 0.0) || proportion > 1.0) {
    throw std::invalid_argument("select_labelled_subset: proportion must be in (0, 1]");
  }
  std::vector<Index> train = assignment.indices_of(Split::kTrain);
  if (train.empty()) {
    throw std::invalid_argument("select_labelled_subset: train split is empty");
  }
  const auto count =
      static_cast<std::size_t>(std::llround(proportion * static_cast<double>(train.size())));
  if (count == 0) {
    throw std::invalid_argument("select_labelled_subset: proportion " + std::to_string(proportion) +
                                " selects zero documents");
  }
  RandomSource rng = RandomSource(seed).substream("labelled");
  rng.shuffle(train);
  std::vector<char> mask(assignment.split.size(), 0);
  for (std::size_t k = 0; k < count; ++k) {
    mask[static_cast<std::size_t>(train[k])] = 1;
  }
  return mask;
}

// --- preprocess ------------------------------------------------------------

PreprocessResult preprocess(const std::vector<RawDocument>& raw,
                            const PreprocessOptions& options) {
  static const IdentityStemmer identity;
  const Stemmer& stemmer = options.stemmer ? *options.stemmer : identity;

  std::vector<std::vector<std::string>> docs;
  docs.reserve(raw.size());
  for (const auto& r : raw) {
    auto tokens = tokenize_and_filter(clean_text(r.content), options.stopwords);
    docs.push_back(normalize_special_tokens(std::move(tokens)));
  }

  PreprocessResult result;
  result.stem = stem_corpus(docs, stemmer);

  std::unordered_map<std::string, int> class_index;
  std::vector<std::vector<std::string>> kept;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (docs[d].empty()) {
      ++result.dropped_empty;
      continue;
    }
    auto [it, inserted] =
        class_index.try_emplace(raw[d].category, static_cast<int>(result.corpus.class_names.size()));
    if (inserted) {
      result.corpus.class_names.push_back(raw[d].category);
    }
    result.corpus.doc_ids.push_back(raw[d].id);
    result.corpus.labels.push_back(it->second);
    kept.push_back(std::move(docs[d]));
  }
  if (kept.empty()) {
    throw std::runtime_error("preprocess: every document is empty after cleaning");
  }
  if (result.corpus.class_names.size() < 2) {
    throw std::runtime_error("preprocess: need at least 2 classes, found " +
                             std::to_string(result.corpus.class_names.size()));
  }

  result.corpus.vocabulary = Vocabulary::build(kept);
  result.corpus.documents.reserve(kept.size());
  for (const auto& doc : kept) {
    std::vector<Index> ids;
    ids.reserve(doc.size());
    for (const auto& tok : doc) {
      ids.push_back(*result.corpus.vocabulary.id_of(tok));
    }
    result.corpus.documents.push_back(std::move(ids));
  }
  return result;
}

// --- dataset loading -------------------------------------------------------

namespace {

// One RFC-4180 record; false at clean EOF. Throws on an unterminated quote.
bool next_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t record_no) {
  fields.clear();
  int ch = in.get();
  if (ch == std::istream::traits_type::eof()) return false;
  std::string field;
  bool in_quotes = false;
  while (true) {
    if (ch == std::istream::traits_type::eof()) {
      if (in_quotes) {
        throw std::runtime_error("csv: unterminated quoted field in record " +
                                 std::to_string(record_no));
      }
      fields.push_back(std::move(field));
      return true;
    }
    const char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(std::move(field));
      return true;
    } else {
      field += c;
    }
    ch = in.get();
  }
}

std::size_t column_of(const std::vector<std::string>& header, const std::string& name,
                      const std::filesystem::path& path) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (trim(header[k]) == name) return k;
  }
  throw std::runtime_error("dataset: missing column '" + name + "' in " + path.string());
}

}  // namespace

std::vector<RawDocument> load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("dataset: cannot open " + path.string());
  }
  // strip a UTF-8 BOM if present
  if (in.peek() == 0xEF) {
    char bom[3];
    in.read(bom, 3);
    if (in.gcount() != 3 || bom[1] != char(0xBB) || bom[2] != char(0xBF)) {
      throw std::runtime_error("dataset: bad byte-order mark in " + path.string());
    }
  }

  std::vector<std::string> fields;
  if (!next_csv_record(in, fields, 1)) {
    throw std::runtime_error("dataset: " + path.string() + " is empty");
  }
  const std::size_t id_col = column_of(fields, "id", path);
  const std::size_t content_col = column_of(fields, "content", path);
  const std::size_t category_col = column_of(fields, "category", path);
  const std::size_t n_cols = fields.size();

  std::vector<RawDocument> docs;
  std::size_t record_no = 1;
  while (next_csv_record(in, fields, record_no + 1)) {
    ++record_no;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != n_cols) {
      throw std::runtime_error("dataset: row " + std::to_string(record_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(n_cols));
    }
    docs.push_back({fields[id_col], fields[content_col], fields[category_col]});
  }
  return docs;
}

std::vector<RawDocument> load_dataset_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("dataset: cannot open " + path.string());
  }
  std::vector<RawDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("dataset: line " + std::to_string(line_no) + ": " + e.what());
    }
    const auto field = [&](const char* name) -> std::string {
      if (!j.contains(name)) {
        throw std::runtime_error("dataset: line " + std::to_string(line_no) +
                                 ": missing field '" + std::string(name) + "'");
      }
      const auto& v = j[name];
      return v.is_string() ? v.get<std::string>() : v.dump();
    };
    docs.push_back({field("id"), field("content"), field("category")});
  }
  return docs;
}

std::vector<RawDocument> load_dataset(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json") {
    return load_dataset_jsonl(path);
  }
  return load_dataset_csv(path);
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("stopwords: cannot open " + path.string());
  }
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const std::string w = trim(line);
    if (!w.empty()) words.insert(w);
  }
  return words;
}

const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> words = {
      "na",     "ya",     "wa",    "za",    "la",    "cha",    "vya",    "kwa",   "ni",
      "katika", "kuwa",   "kama",  "kwamba", "hii",  "hiyo",   "hili",   "hilo",  "huu",
      "huo",    "hizi",   "hizo",  "haya",  "hayo",  "huyu",   "huyo",   "hawa",  "hao",
      "yake",   "wake",   "zake",  "lake",  "yangu", "wangu",  "zangu",  "yao",   "wao",
      "zao",    "yetu",   "wetu",  "zetu",  "ambayo", "ambao", "ambaye", "ambazo", "ambalo",
      "au",     "pia",    "hata",  "sana",  "tu",    "si",     "sio",    "siyo",  "ndio",
      "ndiyo",  "je",     "kila",  "bila",  "baada", "kabla",  "wakati", "hapo",  "hapa",
      "pale",   "huko",   "humo",  "lakini", "ila",  "ingawa", "basi",   "bali",  "yaani",
      "kwani",  "maana",  "hivyo", "hivi",  "vile",  "ile",    "hile",   "zile",  "wale",
      "yule",   "kati",   "juu",   "chini", "ndani", "nje",    "mbele",  "nyuma"};
  return words;
}

}  // namespace textgraph
