#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

#include <unistd.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "reibun/index.hpp"

namespace reibun {
namespace {

using testing::make_sentence;

Sentence cat_ate() {
  return make_sentence(0, {{"猫", "猫", Upos::NOUN, 3, "nsubj"},
                           {"が", "が", Upos::PART, 1, "case"},
                           {"たべ", "食べる", Upos::VERB, 0, "root"},
                           {"た", "た", Upos::AUX, 3, "aux"}});
}

TEST(LemmaKeys, ContentTokensOnly) {
  EXPECT_EQ(lemma_keys(cat_ate()), (std::set<std::string>{"猫", "食べる"}));
}

TEST(LemmaKeys, CompoundNouns) {
  auto s = make_sentence(0, {{"日本", "日本", Upos::NOUN, 2, "compound"}, {"語", "語", Upos::NOUN, 0, "root"}});
  EXPECT_EQ(lemma_keys(s), (std::set<std::string>{"日本", "語", "日本語"}));

  auto three = make_sentence(0, {{"東京", "東京", Upos::PROPN, 3, "compound"},
                                 {"大学", "大学", Upos::NOUN, 3, "compound"},
                                 {"病院", "病院", Upos::NOUN, 4, "nsubj"},
                                 {"ある", "ある", Upos::VERB, 0, "root"}});
  EXPECT_EQ(lemma_keys(three), (std::set<std::string>{"東京", "大学", "病院", "ある", "東京大学病院"}));
}

TEST(LemmaKeys, FunctionWordsOnly) {
  auto s = make_sentence(0, {{"ね", "ね", Upos::PART, 0, "root"}, {"よ", "よ", Upos::PART, 1, "discourse"}});
  EXPECT_TRUE(lemma_keys(s).empty());
}

TEST(LemmatizeQuery, InflectedVerb) {
  auto q = lemmatize_query("たべた", cat_ate());
  EXPECT_EQ(q.content_lemma, "食べる");
  EXPECT_EQ(q.auxiliaries, std::vector<std::string>{"た"});
  EXPECT_EQ(q.display(), "食べる+た");
  EXPECT_EQ(q.span_begin, 2u);
  EXPECT_EQ(q.span_end, 4u);
}

TEST(LemmatizeQuery, SingleNoun) {
  auto q = lemmatize_query("猫", cat_ate());
  EXPECT_EQ(q.content_lemma, "猫");
  EXPECT_TRUE(q.auxiliaries.empty());
}

TEST(LemmatizeQuery, Errors) {
  try {
    lemmatize_query("犬", cat_ate());
    FAIL();
  } catch (const QueryError& e) {
    EXPECT_EQ(e.kind(), QueryError::Kind::NotInContext);
  }
  try {
    lemmatize_query("が", cat_ate());
    FAIL();
  } catch (const QueryError& e) {
    EXPECT_EQ(e.kind(), QueryError::Kind::NoContentLemma);
  }
  EXPECT_THROW(lemmatize_query("", cat_ate()), QueryError);
}

TEST(LemmatizeQuery, CompoundAndLeftmost) {
  auto s = make_sentence(0, {{"日本", "日本", Upos::NOUN, 2, "compound"},
                             {"語", "語", Upos::NOUN, 4, "obj"},
                             {"を", "を", Upos::ADP, 2, "case"},
                             {"話す", "話す", Upos::VERB, 0, "root"},
                             {"日本", "日本", Upos::NOUN, 4, "obl"}});
  EXPECT_EQ(lemmatize_query("日本語", s).content_lemma, "日本語");
  auto first = lemmatize_query("日本", s);
  EXPECT_EQ(first.span_begin, 0u);
}

TEST(BuildIndex, EmptyCorpus) {
  auto ix = build_index({});
  EXPECT_TRUE(ix.all_postings().empty());
  EXPECT_EQ(ix.doc_count(), 0u);
}

TEST(BuildIndex, SharedLemmaIsSorted) {
  auto a = make_sentence(8, {{"見る", "見る", Upos::VERB, 0, "root"}});
  auto b = make_sentence(3, {{"見", "見る", Upos::VERB, 0, "root"}, {"た", "た", Upos::AUX, 1, "aux"}});
  std::vector<Sentence> corpus{a, b};
  auto ix = build_index(corpus);
  auto ids = ix.postings("見る");
  EXPECT_EQ(std::vector<SentenceId>(ids.begin(), ids.end()), (std::vector<SentenceId>{3, 8}));
  EXPECT_EQ(ix.doc_count(), 9u);
  EXPECT_TRUE(ix.postings("た").empty());
}

TEST(BuildIndex, DuplicateIdsRejected) {
  std::vector<Sentence> corpus{cat_ate(), cat_ate()};
  EXPECT_THROW(build_index(corpus), IndexError);
}

TEST(BuildIndex, MatchesLinearScan) {
  auto corpus = testing::synthetic_corpus(1000, 21);
  auto ix = build_index(corpus);
  auto oracle = oracle::scan_index(corpus);
  ASSERT_EQ(ix.sorted_keys().size(), oracle.size());
  for (const auto& [key, ids] : oracle) {
    auto got = ix.postings(key);
    EXPECT_EQ(std::vector<SentenceId>(got.begin(), got.end()), ids) << key;
  }
}

TEST(BuildIndex, PermutationAndThreadsInvariant) {
  auto corpus = testing::synthetic_corpus(700, 4);
  auto base = build_index(corpus);
  std::mt19937_64 rng(99);
  std::shuffle(corpus.begin(), corpus.end(), rng);
  auto shuffled = build_index(corpus, 4);
  EXPECT_EQ(base.all_postings(), shuffled.all_postings());
  EXPECT_EQ(base.fingerprint(), shuffled.fingerprint());
}

TEST(BuildIndex, ConcurrentLookupsAgree) {
  auto corpus = testing::synthetic_corpus(500, 8);
  const auto ix = build_index(corpus);
  const auto keys = ix.sorted_keys();
  auto scan = [&] {
    std::size_t total = 0;
    for (const auto& k : keys) total += ix.postings(k).size();
    return total;
  };
  const std::size_t serial = scan();
  std::vector<std::future<std::size_t>> jobs;
  for (int i = 0; i < 4; ++i) jobs.push_back(std::async(std::launch::async, scan));
  for (auto& j : jobs) EXPECT_EQ(j.get(), serial);
}

TEST(Lookup, UsesContentLemmaOnly) {
  std::vector<Sentence> corpus{cat_ate()};
  auto ix = build_index(corpus);
  auto q = lemmatize_query("たべた", corpus[0]);
  EXPECT_EQ(lookup(ix, q).size(), 1u);
  q.content_lemma = "飲む";
  EXPECT_TRUE(lookup(ix, q).empty());
}

TEST(Fingerprint, SensitiveToContent) {
  auto corpus = testing::synthetic_corpus(20, 1);
  const auto fp = corpus_fingerprint(corpus);
  corpus[5].level = corpus[5].level == Level::N1 ? Level::N2 : Level::N1;
  EXPECT_NE(corpus_fingerprint(corpus), fp);
}

// ------------------------------------------------------------- persistence

class Persistence : public ::testing::Test {
 protected:
  std::filesystem::path path_ = std::filesystem::temp_directory_path() /
                                ("reibun_ix_" + std::to_string(::getpid()) + ".idx");
  void TearDown() override { std::filesystem::remove(path_); }

  std::string bytes() {
    std::ifstream in(path_, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }
  void write(const std::string& b) {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    out << b;
  }
};

TEST_F(Persistence, RoundTripEmpty) {
  auto ix = build_index({});
  save_index(ix, path_);
  EXPECT_EQ(load_index(path_), ix);
}

TEST_F(Persistence, RoundTripLarge) {
  auto corpus = testing::synthetic_corpus(1000, 2);
  auto ix = build_index(corpus);
  save_index(ix, path_);
  auto loaded = load_index(path_);
  EXPECT_EQ(loaded, ix);
  EXPECT_EQ(loaded.built_at(), ix.built_at());

  std::ostringstream a, b;
  write_index(a, ix);
  write_index(b, loaded);
  EXPECT_EQ(a.str(), b.str());
}

TEST_F(Persistence, TruncationIsDetected) {
  auto corpus = testing::synthetic_corpus(50, 2);
  save_index(build_index(corpus), path_);
  const std::string full = bytes();
  for (std::size_t cut : {full.size() - 1, full.size() / 2, std::size_t{20}, std::size_t{3}}) {
    write(full.substr(0, cut));
    EXPECT_THROW(load_index(path_), IndexFormatError) << cut;
  }
}

TEST_F(Persistence, BitFlipIsDetected) {
  auto corpus = testing::synthetic_corpus(50, 2);
  save_index(build_index(corpus), path_);
  std::string b = bytes();
  b[b.size() / 2] ^= 0x10;
  write(b);
  EXPECT_THROW(load_index(path_), IndexFormatError);
}

TEST_F(Persistence, VersionMismatch) {
  save_index(build_index({}), path_);
  std::string b = bytes();
  b[8] = 9;
  write(b);
  try {
    load_index(path_);
    FAIL();
  } catch (const IndexFormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
}

TEST_F(Persistence, MissingFile) {
  EXPECT_THROW(load_index(path_.string() + ".nope"), IndexError);
}

}  // namespace
}  // namespace reibun
