#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "textgraph/corpus.hpp"

using namespace textgraph;

namespace {

const std::unordered_set<std::string> kNoStopwords;

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

// Corpus with given per-class document counts; every document is the single
// token "xx". Bypasses preprocess so split_corpus can be probed directly.
ProcessedCorpus corpus_with_class_sizes(const std::vector<Index>& sizes) {
  ProcessedCorpus c;
  c.vocabulary = Vocabulary::build({{"xx"}});
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    c.class_names.push_back("class" + std::to_string(k));
    for (Index d = 0; d < sizes[k]; ++d) {
      c.doc_ids.push_back("c" + std::to_string(k) + "d" + std::to_string(d));
      c.documents.push_back({0});
      c.labels.push_back(static_cast<int>(k));
    }
  }
  return c;
}

}  // namespace

TEST_CASE("clean_text examples") {
  CHECK(clean_text("Habari   NJEMA") == "habari njema");
  CHECK(clean_text("soma https://t.co/abc sasa") == "soma sasa");
  CHECK(clean_text("caf\xc3\xa9") == "cafe");  // café
}

TEST_CASE("clean_text strips twitter meta tokens") {
  CHECK(clean_text("@rais habari #siasa www.mfano.co.tz http://a.b sasa") == "habari sasa");
  CHECK(clean_text("habari#njema") == "habari#njema");  // only token-initial '#'
  CHECK(clean_text("  \t\n  ") == "");
}

TEST_CASE("clean_text transliterates and drops unmappable codepoints") {
  CHECK(clean_text("na\xc3\xaf"
                   "ve \xc5\x9e"
                   "asi") == "naive sasi");  // naïve Şasi
  CHECK(clean_text("\xe2\x80\x9cquote\xe2\x80\x9d") == "\"quote\"");  // curly quotes
  CHECK(clean_text("a\xe4\xb8\xadz") == "az");                        // CJK dropped
  // combining acute on 'e'
  CHECK(clean_text("cafe\xcc\x81") == "cafe");
}

TEST_CASE("clean_text is idempotent") {
  const std::vector<std::string> samples = {
      "Habari   NJEMA",
      "@user soma https://t.co/x www.a.b #tag MAMBO  y\xc3\xa4o",
      "\xe2\x80\x9cM\xc3\xbcller\xe2\x80\x9d na wenzake...",
      "mstari\r\nwa pili\tna tatu",
  };
  for (const auto& s : samples) {
    const std::string once = clean_text(s);
    CHECK(clean_text(once) == once);
  }
}

TEST_CASE("tokenize_and_filter examples") {
  CHECK(tokenize_and_filter("habari njema 2021", kNoStopwords) ==
        std::vector<std::string>{"habari", "njema"});
  CHECK(tokenize_and_filter("a habari", kNoStopwords) == std::vector<std::string>{"habari"});
  CHECK(tokenize_and_filter("na habari", {{"na"}}) == std::vector<std::string>{"habari"});
  CHECK(tokenize_and_filter("habari,njema!sana", kNoStopwords) ==
        std::vector<std::string>{"habari", "njema", "sana"});
  CHECK(tokenize_and_filter("mwaka2021 ni x7", kNoStopwords) ==
        std::vector<std::string>{"ni"});
  CHECK(tokenize_and_filter("", kNoStopwords).empty());
}

TEST_CASE("normalize_special_tokens patterns") {
  CHECK(normalize_special_tokens({"hahaha"}) == std::vector<std::string>{"laughter"});
  CHECK(normalize_special_tokens({"haha"}) == std::vector<std::string>{"laughter"});
  CHECK(normalize_special_tokens({"hehehe"}) == std::vector<std::string>{"laughter"});
  CHECK(normalize_special_tokens({"hahehi"}) == std::vector<std::string>{"laughter"});
  CHECK(normalize_special_tokens({"ha"}) == std::vector<std::string>{"ha"});  // too short
  CHECK(normalize_special_tokens({"bumbum"}) == std::vector<std::string>{"onomatopoeia"});
  CHECK(normalize_special_tokens({"bumbumbum"}) == std::vector<std::string>{"onomatopoeia"});
  CHECK(normalize_special_tokens({"abab"}) == std::vector<std::string>{"onomatopoeia"});
  CHECK(normalize_special_tokens({"vroomvroom"}) ==
        std::vector<std::string>{"vroomvroom"});  // unit longer than 4
  CHECK(normalize_special_tokens({"habari"}) == std::vector<std::string>{"habari"});
}

TEST_CASE("stem_corpus rules") {
  IdentityStemmer identity;

  std::vector<std::vector<std::string>> docs = {{"anacheza", "anacheza"}};
  stem_corpus(docs, identity);
  CHECK(docs == std::vector<std::vector<std::string>>{{"anacheza", "anacheza"}});

  std::vector<std::vector<std::string>> with_long = {
      {std::string(31, 'x'), "habari"}};
  const auto report = stem_corpus(with_long, identity);
  CHECK(with_long == std::vector<std::vector<std::string>>{{"habari"}});
  CHECK(report.discarded == 1);

  const auto table_path = temp_file("textgraph_test_stems.tsv", "kucheza\tcheza\n");
  const TableStemmer table = TableStemmer::load(table_path);
  std::vector<std::vector<std::string>> repeated = {{"kucheza"}, {"kucheza"}};
  stem_corpus(repeated, table);
  CHECK(repeated == std::vector<std::vector<std::string>>{{"cheza"}, {"cheza"}});

  // frequency-1 tokens stay unstemmed
  std::vector<std::vector<std::string>> once = {{"kucheza"}};
  stem_corpus(once, table);
  CHECK(once == std::vector<std::vector<std::string>>{{"kucheza"}});
  std::filesystem::remove(table_path);
}

TEST_CASE("stem_corpus passes tokens through on stemmer failure") {
  struct ThrowingStemmer final : Stemmer {
    std::string stem(const std::string& token) const override {
      if (token == "mbaya") throw std::runtime_error("boom");
      if (token == "tupu") return "";
      return token;
    }
  } stemmer;
  std::vector<std::vector<std::string>> docs = {{"mbaya", "mbaya", "tupu", "tupu"}};
  const auto report = stem_corpus(docs, stemmer);
  CHECK(docs == std::vector<std::vector<std::string>>{{"mbaya", "mbaya", "tupu", "tupu"}});
  CHECK(report.warnings == 4);
}

TEST_CASE("build_vocabulary counts and errors") {
  const Vocabulary v = build_vocabulary({{"a", "b"}, {"b"}});
  REQUIRE(v.size() == 2);
  CHECK(*v.id_of("a") == 0);
  CHECK(*v.id_of("b") == 1);
  CHECK(v.doc_frequency(0) == 1);
  CHECK(v.doc_frequency(1) == 2);
  CHECK(v.frequency(1) == 2);

  const Vocabulary v2 = build_vocabulary({{"a", "a"}});
  CHECK(v2.frequency(0) == 2);
  CHECK(v2.doc_frequency(0) == 1);

  CHECK_THROWS_AS(build_vocabulary({}), std::invalid_argument);
  CHECK_FALSE(v.id_of("zzz").has_value());
}

TEST_CASE("split_corpus reproduces the per-class 8:1:1 pattern") {
  // class sizes of the real dataset; totals must come out exactly
  const auto corpus = corpus_with_class_sizes({10242, 6003, 2229, 2027, 1906, 859});
  const SplitAssignment a = split_corpus(corpus, 0);
  CHECK(a.count_of(Split::kTrain) == 18612);
  CHECK(a.count_of(Split::kValidation) == 2327);
  CHECK(a.count_of(Split::kTest) == 2327);

  // smallest class alone: 859 -> 687/86/86
  std::array<Index, 3> afya = {0, 0, 0};
  for (std::size_t d = 0; d < a.split.size(); ++d) {
    if (corpus.labels[d] == 5) ++afya[static_cast<std::size_t>(a.split[d])];
  }
  CHECK(afya[0] == 687);
  CHECK(afya[1] == 86);
  CHECK(afya[2] == 86);
}

TEST_CASE("split_corpus exact ratio on 10 docs") {
  const auto corpus = corpus_with_class_sizes({10});
  const SplitAssignment a = split_corpus(corpus, 3);
  CHECK(a.count_of(Split::kTrain) == 8);
  CHECK(a.count_of(Split::kValidation) == 1);
  CHECK(a.count_of(Split::kTest) == 1);
}

TEST_CASE("split_corpus determinism and partition") {
  const auto corpus = corpus_with_class_sizes({40, 25});
  const SplitAssignment a = split_corpus(corpus, 5);
  const SplitAssignment b = split_corpus(corpus, 5);
  CHECK(a.split == b.split);
  const SplitAssignment c = split_corpus(corpus, 6);
  CHECK(a.split != c.split);
  // union of splits covers the corpus; tags are exhaustive and exclusive
  CHECK(a.count_of(Split::kTrain) + a.count_of(Split::kValidation) + a.count_of(Split::kTest) ==
        corpus.n_docs());
}

TEST_CASE("split_corpus errors") {
  CHECK_THROWS_AS(split_corpus(corpus_with_class_sizes({5, 4}), 0), std::invalid_argument);
  CHECK_THROWS_AS(split_corpus(corpus_with_class_sizes({12, 2}), 0), std::invalid_argument);
}

TEST_CASE("select_labelled_subset counts and determinism") {
  const auto corpus = corpus_with_class_sizes({10242, 6003, 2229, 2027, 1906, 859});
  const SplitAssignment a = split_corpus(corpus, 0);
  REQUIRE(a.count_of(Split::kTrain) == 18612);

  const auto mask20 = select_labelled_subset(a, 0.20, 7);
  CHECK(std::count(mask20.begin(), mask20.end(), 1) == 3722);
  const auto mask1 = select_labelled_subset(a, 0.01, 7);
  CHECK(std::count(mask1.begin(), mask1.end(), 1) == 186);
  const auto all = select_labelled_subset(a, 1.0, 7);
  CHECK(std::count(all.begin(), all.end(), 1) == 18612);

  CHECK(select_labelled_subset(a, 0.20, 7) == mask20);
  CHECK(select_labelled_subset(a, 0.20, 8) != mask20);
  for (std::size_t d = 0; d < mask20.size(); ++d) {
    if (mask20[d]) CHECK(a.split[d] == Split::kTrain);
  }

  const auto small = corpus_with_class_sizes({10});
  const auto split_small = split_corpus(small, 0);
  CHECK_THROWS_AS(select_labelled_subset(split_small, 0.01, 0), std::invalid_argument);
  CHECK_THROWS_AS(select_labelled_subset(split_small, 1.5, 0), std::invalid_argument);
}

TEST_CASE("preprocess pipeline invariants") {
  std::vector<RawDocument> raw = {
      {"1", "Habari njema za LEO, rais alisema hahaha mambo 42 mengi sana!", "siasa"},
      {"2", "mpira wa miguu leo usiku @timu #ligi www.mpira.tz kucheza kucheza", "michezo"},
      {"3", ".", "siasa"},  // empties out, dropped
      {"4", "habari za mpira leo " + std::string(40, 'k') + " nyingine", "michezo"},
  };
  PreprocessOptions options;
  options.stopwords = {"za", "wa"};
  const auto result = preprocess(raw, options);
  CHECK(result.dropped_empty == 1);
  CHECK(result.corpus.documents.size() == 3);
  CHECK(result.corpus.class_names == std::vector<std::string>{"siasa", "michezo"});

  const auto& v = result.corpus.vocabulary;
  for (Index id = 0; id < v.size(); ++id) {
    const std::string& tok = v.token(id);
    CHECK(tok.size() >= 2);
    CHECK(tok.size() <= 30);
    CHECK(options.stopwords.find(tok) == options.stopwords.end());
    for (char c : tok) {
      CHECK((c >= 'a' && c <= 'z'));
    }
  }
  CHECK(v.id_of("laughter").has_value());   // hahaha
  CHECK_FALSE(v.id_of("mambo42").has_value());
  CHECK_FALSE(v.id_of(std::string(40, 'k')).has_value());
  for (const auto& doc : result.corpus.documents) {
    CHECK_FALSE(doc.empty());
    for (Index id : doc) CHECK(id < v.size());
  }
}

TEST_CASE("csv loader handles quoting and errors") {
  const auto good = temp_file("textgraph_test_ok.csv",
                              "id,content,category\n"
                              "1,\"habari, \"\"njema\"\"\nya leo\",siasa\n"
                              "2,mpira leo,michezo\n");
  const auto docs = load_dataset_csv(good);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].id == "1");
  CHECK(docs[0].content == "habari, \"njema\"\nya leo");
  CHECK(docs[0].category == "siasa");
  CHECK(docs[1].content == "mpira leo");
  std::filesystem::remove(good);

  const auto bad_cols = temp_file("textgraph_test_badcols.csv",
                                  "id,content,category\n1,habari\n");
  CHECK_THROWS_WITH_AS(static_cast<void>(load_dataset_csv(bad_cols)),
                       doctest::Contains("row 2"), std::runtime_error);
  std::filesystem::remove(bad_cols);

  const auto no_col = temp_file("textgraph_test_nocol.csv", "id,text\n1,habari\n");
  CHECK_THROWS_WITH_AS(static_cast<void>(load_dataset_csv(no_col)),
                       doctest::Contains("content"), std::runtime_error);
  std::filesystem::remove(no_col);
}

TEST_CASE("jsonl loader") {
  const auto good = temp_file("textgraph_test_ok.jsonl",
                              "{\"id\": \"1\", \"content\": \"habari njema\", \"category\": \"siasa\"}\n"
                              "\n"
                              "{\"id\": 2, \"content\": \"mpira\", \"category\": \"michezo\"}\n");
  const auto docs = load_dataset_jsonl(good);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].content == "habari njema");
  CHECK(docs[1].id == "2");
  std::filesystem::remove(good);

  const auto bad = temp_file("textgraph_test_bad.jsonl", "{\"id\": \"1\"\n");
  CHECK_THROWS_WITH_AS(static_cast<void>(load_dataset_jsonl(bad)), doctest::Contains("line 1"),
                       std::runtime_error);
  std::filesystem::remove(bad);
}

TEST_CASE("vocabulary, corpus and split artifacts round trip") {
  std::vector<RawDocument> raw = {
      {"a", "habari njema leo sana", "siasa"},   {"b", "mpira kandanda leo", "michezo"},
      {"c", "habari mpira sana nane", "siasa"},  {"d", "kandanda uwanja leo", "michezo"},
      {"e", "siasa habari bunge leo", "siasa"},  {"f", "uwanja mpira leo", "michezo"},
      {"g", "bunge siasa nane habari", "siasa"}, {"h", "mpira leo kandanda", "michezo"},
      {"i", "habari leo bunge", "siasa"},        {"j", "uwanja kandanda nane", "michezo"},
  };
  const auto result = preprocess(raw, {});
  const auto dir = std::filesystem::temp_directory_path();

  result.corpus.vocabulary.save(dir / "tg_vocab.tsv");
  const Vocabulary v = Vocabulary::load(dir / "tg_vocab.tsv");
  REQUIRE(v.size() == result.corpus.vocabulary.size());
  for (Index id = 0; id < v.size(); ++id) {
    CHECK(v.token(id) == result.corpus.vocabulary.token(id));
    CHECK(v.frequency(id) == result.corpus.vocabulary.frequency(id));
    CHECK(v.doc_frequency(id) == result.corpus.vocabulary.doc_frequency(id));
  }

  result.corpus.save(dir / "tg_corpus.txt");
  const ProcessedCorpus c = ProcessedCorpus::load(dir / "tg_corpus.txt", v);
  CHECK(c.documents == result.corpus.documents);
  CHECK(c.labels == result.corpus.labels);
  CHECK(c.class_names == result.corpus.class_names);
  CHECK(c.doc_ids == result.corpus.doc_ids);

  SplitAssignment split = split_corpus(result.corpus, 1);
  split.labelled = select_labelled_subset(split, 0.5, 1);
  split.save(dir / "tg_splits.csv", result.corpus.doc_ids);
  const SplitAssignment loaded = SplitAssignment::load(dir / "tg_splits.csv", c.doc_ids);
  CHECK(loaded.split == split.split);
  CHECK(loaded.labelled == split.labelled);

  for (const auto& name : {"tg_vocab.tsv", "tg_corpus.txt", "tg_splits.csv"}) {
    std::filesystem::remove(dir / name);
  }
}

TEST_CASE("stopword file loader and default list") {
  const auto path = temp_file("textgraph_test_stop.txt", "na\n  ya  \n\nwa\n");
  const auto words = load_stopwords(path);
  CHECK(words == std::unordered_set<std::string>{"na", "ya", "wa"});
  std::filesystem::remove(path);
  CHECK(default_stopwords().count("na") == 1);
  CHECK(default_stopwords().count("katika") == 1);
}
