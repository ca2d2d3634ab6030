#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reibun/diversity.hpp"
#include "reibun/embedding.hpp"
#include "reibun/index.hpp"
#include "reibun/scoring.hpp"
#include "reibun/sentence.hpp"

namespace reibun {

/// Id given to context sentences that do not carry their own.
inline constexpr SentenceId kContextSentenceId = std::numeric_limits<SentenceId>::max();

struct Query {
  std::string word;
  Sentence context;
  Level target_level = Level::N3;
  std::size_t k = 5;
  std::size_t window = 50;

  /// Throws std::invalid_argument when k == 0 or window < k.
  void validate() const;
};

struct ScoredCandidate {
  SentenceId sentence_id = 0;
  double difficulty_score = 0.0;
  double sense_score = 0.0;
  double quality = 0.0;
  std::optional<std::size_t> selected_rank;  // 1-based selection step
  TokenSpan target_span;
};

struct SelectionConfig {
  DifficultyConfig difficulty;
  /// Pool the context sentence into the lexical n-gram counts.
  bool context_in_lexical = true;
  const LabelMap* labels = &LabelMap::builtin();
  LabelGranularity granularity = LabelGranularity::Relation;
  /// Worker threads for embedding lookups.
  unsigned threads = 1;
};

struct SuggestionItem {
  Sentence sentence;
  ScoredCandidate score;
};

struct SuggestionList {
  std::string word;
  std::string context;
  Level target_level = Level::N3;
  std::size_t k = 0;
  std::size_t window = 0;
  QueryLemma lemma;

  std::vector<SuggestionItem> items;
  /// Diversity of the context sentence together with the items.
  DiversityScore diversity;
  std::size_t candidate_count = 0;
  /// Fewer than k usable candidates were available.
  bool truncated = false;
  /// Set when nothing could be suggested, e.g. the lemma is not indexed.
  std::optional<std::string> empty_reason;
};

/// Token span in `s` carrying an index key: a content token with that
/// lemma, or a NOUN/PROPN run whose lemmas concatenate to it.
std::optional<TokenSpan> find_target_span(const Sentence& s, std::string_view key);

/// Scores and sorts candidates by quality (descending, ties by id). Exact
/// duplicates of the context are dropped. A candidate whose embedding fails
/// is dropped with a warning when at least `q.window` candidates survive;
/// otherwise the first failure is rethrown.
std::vector<ScoredCandidate> rank_candidates(std::span<const SentenceId> ids, const Query& q,
                                             const QueryLemma& lemma, const Corpus& corpus,
                                             EmbeddingProvider& provider,
                                             const SelectionConfig& cfg = {});

/// Diversity of the context sentence plus `items`, as greedy selection sees it.
DiversityScore list_diversity(const Sentence& context, std::span<const Sentence* const> items,
                              const SelectionConfig& cfg = {});

/// Windowed greedy diversification seeded with the context sentence.
SuggestionList greedy_select(std::span<const ScoredCandidate> ranked, const Query& q,
                             const Corpus& corpus, const SelectionConfig& cfg = {});

/// lemmatize_query -> lookup -> rank_candidates -> greedy_select. Throws
/// QueryError for words that cannot be lemmatised; an unindexed lemma
/// yields an empty list with `empty_reason` set.
SuggestionList suggest(const Query& q, const InvertedIndex& index, const Corpus& corpus,
                       EmbeddingProvider& provider, const SelectionConfig& cfg = {});

}  // namespace reibun
