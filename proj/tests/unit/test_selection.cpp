#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "reibun/corpus.hpp"
#include "reibun/selection.hpp"

namespace reibun {
namespace {

using testing::make_sentence;

struct World {
  std::vector<Sentence> sentences;
  Corpus corpus;
  InvertedIndex index;
  StubEmbeddings stub{32, 1};

  explicit World(std::size_t n, std::uint64_t seed = 42)
      : sentences(testing::synthetic_corpus(n, seed)), corpus(sentences), index(build_index(sentences)) {}
};

Query verb_query(const std::string& lemma, std::uint64_t seed, Level level = Level::N3) {
  testing::SentenceGenerator gen(seed);
  Query q;
  q.context = gen.next_with_verb(kContextSentenceId, lemma);
  q.word = q.context.tokens[q.context.root()].surface;
  q.target_level = level;
  return q;
}

TEST(QueryValidation, KAndWindow) {
  Query q;
  q.k = 0;
  EXPECT_THROW(q.validate(), std::invalid_argument);
  q.k = 5;
  q.window = 4;
  EXPECT_THROW(q.validate(), std::invalid_argument);
  q.window = 5;
  EXPECT_NO_THROW(q.validate());
}

TEST(TargetSpan, ContentTokenThenCompound) {
  auto s = make_sentence(0, {{"日本", "日本", Upos::PROPN, 2, "compound"},
                             {"語", "語", Upos::NOUN, 4, "obj"},
                             {"を", "を", Upos::ADP, 2, "case"},
                             {"話し", "話す", Upos::VERB, 0, "root"},
                             {"た", "た", Upos::AUX, 4, "aux"}});
  EXPECT_EQ(find_target_span(s, "話す"), (TokenSpan{3, 4}));
  EXPECT_EQ(find_target_span(s, "日本語"), (TokenSpan{0, 2}));
  EXPECT_EQ(find_target_span(s, "語"), (TokenSpan{1, 2}));
  EXPECT_FALSE(find_target_span(s, "た"));
}

TEST(Rank, SortedByQualityThenId) {
  World w(400);
  auto q = verb_query("見る", 1);
  auto lemma = lemmatize_query(q.word, q.context);
  auto ranked = rank_candidates(lookup(w.index, lemma), q, lemma, w.corpus, w.stub);
  ASSERT_GT(ranked.size(), 10u);
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    const auto& a = ranked[i - 1];
    const auto& b = ranked[i];
    EXPECT_TRUE(a.quality > b.quality || (a.quality == b.quality && a.sentence_id < b.sentence_id));
  }
  for (const auto& c : ranked) {
    const Sentence& s = w.corpus.at(c.sentence_id);
    EXPECT_EQ(c.difficulty_score, difficulty_score(q.target_level, s.level));
    EXPECT_EQ(c.quality, 0.5 * c.difficulty_score + 0.5 * c.sense_score);
    EXPECT_EQ(s.tokens[c.target_span.begin].lemma, "見る");
    EXPECT_FALSE(c.selected_rank);
  }
}

TEST(Rank, DropsContextDuplicates) {
  World w(300);
  auto q = verb_query("見る", 2);
  q.context = w.corpus.at(w.index.postings("見る")[0]);
  q.word = q.context.tokens[q.context.root()].surface;
  auto lemma = lemmatize_query(q.word, q.context);
  auto ranked = rank_candidates(lookup(w.index, lemma), q, lemma, w.corpus, w.stub);
  for (const auto& c : ranked) EXPECT_NE(c.sentence_id, q.context.id);
  EXPECT_EQ(ranked.size() + 1, lookup(w.index, lemma).size());
}

TEST(Rank, ThreadCountDoesNotChangeResult) {
  World w(400);
  auto q = verb_query("書く", 3);
  auto lemma = lemmatize_query(q.word, q.context);
  SelectionConfig four;
  four.threads = 4;
  auto a = rank_candidates(lookup(w.index, lemma), q, lemma, w.corpus, w.stub);
  auto b = rank_candidates(lookup(w.index, lemma), q, lemma, w.corpus, w.stub, four);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].sentence_id, b[i].sentence_id);
    EXPECT_EQ(a[i].quality, b[i].quality);
  }
}

// Answers for the context and for even sentence ids only.
class HalfProvider : public EmbeddingProvider {
 public:
  std::size_t dimension() const override { return 3; }
  ProviderMode mode() const override { return ProviderMode::PrecomputedFile; }
  TargetEmbedding embed(const Sentence& s, TokenSpan span) override {
    if (s.id != kContextSentenceId && s.id % 2 == 1) throw MissingEmbedding("odd");
    return {{1.0, 0.5, static_cast<double>(s.id % 7)}, s.id, span};
  }
};

TEST(Rank, EmbeddingFailuresAgainstWindow) {
  World w(400);
  auto q = verb_query("見る", 4);
  auto lemma = lemmatize_query(q.word, q.context);
  HalfProvider half;
  const std::size_t usable = [&] {
    std::size_t n = 0;
    for (SentenceId id : lookup(w.index, lemma)) n += id % 2 == 0;
    return n;
  }();
  q.window = usable;
  EXPECT_EQ(rank_candidates(lookup(w.index, lemma), q, lemma, w.corpus, half).size(), usable);
  q.window = usable + 1;
  EXPECT_THROW(rank_candidates(lookup(w.index, lemma), q, lemma, w.corpus, half), MissingEmbedding);
}

TEST(Greedy, SelectsKDistinctRankedOneToK) {
  World w(600);
  auto q = verb_query("読む", 5);
  auto list = suggest(q, w.index, w.corpus, w.stub);
  ASSERT_EQ(list.items.size(), 5u);
  EXPECT_FALSE(list.truncated);
  EXPECT_FALSE(list.empty_reason);
  EXPECT_EQ(list.lemma.content_lemma, "読む");
  std::set<std::string> keys{dedup_key(q.context)};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(list.items[i].score.selected_rank, i + 1);
    EXPECT_TRUE(keys.insert(dedup_key(list.items[i].sentence)).second);
    EXPECT_TRUE(lemma_keys(list.items[i].sentence).contains("読む"));
  }
}

TEST(Greedy, EachStepMaximisesRecomputedDiversity) {
  World w(600);
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    auto q = verb_query(testing::SentenceGenerator::verb_lemmas()[seed % 12], seed);
    q.window = 20;
    auto lemma = lemmatize_query(q.word, q.context);
    auto ranked = rank_candidates(lookup(w.index, lemma), q, lemma, w.corpus, w.stub);
    auto list = greedy_select(ranked, q, w.corpus);

    std::vector<const Sentence*> chosen;
    for (const auto& item : list.items) {
      double best = -1.0;
      for (std::size_t i = 0; i < std::min(ranked.size(), q.window); ++i) {
        const Sentence* c = &w.corpus.at(ranked[i].sentence_id);
        if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
        auto trial = chosen;
        trial.push_back(c);
        best = std::max(best, list_diversity(q.context, trial).combined);
      }
      chosen.push_back(&w.corpus.at(item.score.sentence_id));
      EXPECT_NEAR(list_diversity(q.context, chosen).combined, best, 1e-12);
    }
    EXPECT_NEAR(list.diversity.combined, list_diversity(q.context, chosen).combined, 1e-12);
  }
}

TEST(Greedy, WindowLimitsThePool) {
  World w(600);
  auto q = verb_query("見る", 6);
  q.k = 3;
  q.window = 3;
  auto lemma = lemmatize_query(q.word, q.context);
  auto ranked = rank_candidates(lookup(w.index, lemma), q, lemma, w.corpus, w.stub);
  auto list = greedy_select(ranked, q, w.corpus);
  std::set<SentenceId> top{ranked[0].sentence_id, ranked[1].sentence_id, ranked[2].sentence_id};
  for (const auto& item : list.items) EXPECT_TRUE(top.contains(item.score.sentence_id));
  EXPECT_EQ(list.candidate_count, ranked.size());
}

TEST(Greedy, TiesGoToTheHigherRankedCandidate) {
  // three identical candidates: every step is a tie
  std::vector<Sentence> sentences;
  for (SentenceId id : {4u, 9u, 2u}) {
    sentences.push_back(make_sentence(id, {{"猫", "猫", Upos::NOUN, 2, "nsubj"}, {"寝る", "寝る", Upos::VERB, 0, "root"}},
                                      Level::N3));
    sentences.back().tokens[0].surface = "猫" + std::to_string(id);
  }
  Corpus corpus(sentences);
  std::vector<ScoredCandidate> ranked;
  for (SentenceId id : {2u, 4u, 9u}) ranked.push_back({id, 1.0, 1.0, 1.0, std::nullopt, {1, 2}});
  Query q;
  q.context = make_sentence(kContextSentenceId, {{"犬", "犬", Upos::NOUN, 2, "nsubj"}, {"寝る", "寝る", Upos::VERB, 0, "root"}});
  q.word = "寝る";
  q.k = 2;
  auto list = greedy_select(ranked, q, corpus);
  ASSERT_EQ(list.items.size(), 2u);
  EXPECT_EQ(list.items[0].score.sentence_id, 2u);
  EXPECT_EQ(list.items[1].score.sentence_id, 4u);
}

TEST(Greedy, NfkcDuplicatesAreSkipped) {
  std::vector<Sentence> sentences{
      make_sentence(1, {{"ネコ", "猫", Upos::NOUN, 2, "nsubj"}, {"寝る", "寝る", Upos::VERB, 0, "root"}}, Level::N3),
      make_sentence(2, {{"ﾈｺ", "猫", Upos::NOUN, 2, "nsubj"}, {"寝る", "寝る", Upos::VERB, 0, "root"}}, Level::N3),
      make_sentence(3, {{"犬", "犬", Upos::NOUN, 2, "nsubj"}, {"寝る", "寝る", Upos::VERB, 0, "root"}}, Level::N3)};
  Corpus corpus(sentences);
  std::vector<ScoredCandidate> ranked;
  for (SentenceId id : {1u, 2u, 3u}) ranked.push_back({id, 1.0, 1.0, 1.0, std::nullopt, {1, 2}});
  Query q;
  q.context = make_sentence(kContextSentenceId, {{"鳥", "鳥", Upos::NOUN, 2, "nsubj"}, {"寝る", "寝る", Upos::VERB, 0, "root"}});
  q.word = "寝る";
  q.k = 3;
  auto list = greedy_select(ranked, q, corpus);
  EXPECT_EQ(list.items.size(), 2u);
  EXPECT_TRUE(list.truncated);
}

TEST(Suggest, UnindexedLemmaIsAnEmptyResult) {
  World w(100);
  Query q;
  q.context = make_sentence(kContextSentenceId, {{"象", "象", Upos::NOUN, 2, "nsubj"}, {"泳ぐ", "泳ぐ", Upos::VERB, 0, "root"}});
  q.word = "泳ぐ";
  auto list = suggest(q, w.index, w.corpus, w.stub);
  EXPECT_TRUE(list.items.empty());
  EXPECT_TRUE(list.truncated);
  ASSERT_TRUE(list.empty_reason);
  EXPECT_NE(list.empty_reason->find("泳ぐ"), std::string::npos);
  EXPECT_EQ(list.diversity.syntactic, 1.0);
}

TEST(Suggest, QueryErrorsPropagate) {
  World w(100);
  auto q = verb_query("見る", 7);
  q.word = "存在しない";
  EXPECT_THROW(suggest(q, w.index, w.corpus, w.stub), QueryError);
}

TEST(Suggest, PermutedCorpusGivesSameList) {
  World w(500);
  auto q = verb_query("使う", 8);
  auto a = suggest(q, w.index, w.corpus, w.stub);

  auto shuffled = w.sentences;
  std::mt19937_64 rng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  Corpus corpus(shuffled);
  auto index = build_index(shuffled, 3);
  auto b = suggest(q, index, corpus, w.stub);
  ASSERT_EQ(a.items.size(), b.items.size());
  for (std::size_t i = 0; i < a.items.size(); ++i) EXPECT_EQ(a.items[i].score.sentence_id, b.items[i].score.sentence_id);
}

TEST(ListDiversity, ContextLexicalToggle) {
  auto ctx = make_sentence(0, {{"猫", "猫", Upos::NOUN, 2, "nsubj"}, {"寝る", "寝る", Upos::VERB, 0, "root"}});
  auto other = make_sentence(1, {{"猫", "猫", Upos::NOUN, 2, "nsubj"}, {"寝る", "寝る", Upos::VERB, 0, "root"}});
  const Sentence* items[] = {&other};
  SelectionConfig without;
  without.context_in_lexical = false;
  EXPECT_EQ(list_diversity(ctx, items).lexical, 0.5);
  EXPECT_EQ(list_diversity(ctx, items, without).lexical, 1.0);
  EXPECT_EQ(list_diversity(ctx, items).syntactic, 0.0);
  EXPECT_EQ(list_diversity(ctx, {}).syntactic, 1.0);
}

}  // namespace
}  // namespace reibun
