#include <algorithm>

#include "reibun/corpus.hpp"
#include "reibun/selection.hpp"

namespace reibun {

namespace {

// Incremental diversity of a list that starts with the context sentence.
// Pairwise tree similarities are cached per query.
class ListState {
 public:
  ListState(const Sentence& context, std::span<const Sentence* const> pool, const SelectionConfig& cfg)
      : n_(pool.size() + 1), sim_(n_ * n_, -1.0) {
    trees_.reserve(n_);
    tokens_.reserve(n_);
    trees_.push_back(generalize_labels(context, *cfg.labels, cfg.granularity));
    tokens_.push_back(surface_tokens(context));
    for (const Sentence* s : pool) {
      trees_.push_back(generalize_labels(*s, *cfg.labels, cfg.granularity));
      tokens_.push_back(surface_tokens(*s));
    }
    self_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) self_[i] = subtree_kernel(trees_[i], trees_[i]);

    selected_.push_back(0);
    if (cfg.context_in_lexical) lexical_.add(tokens_[0]);
  }

  /// Combined diversity of the current list plus pool entry `c` (1-based
  /// into the pool; 0 is the context).
  DiversityScore with(std::size_t c) {
    const std::size_t m = selected_.size();
    double pair_sum = pair_sum_;
    for (std::size_t x : selected_) pair_sum += 1.0 - similarity(c, x);
    const double syntactic = pair_sum / static_cast<double>((m + 1) * m / 2);
    return make_diversity(syntactic, lexical_.diversity_with(tokens_[c]));
  }

  void select(std::size_t c) {
    for (std::size_t x : selected_) pair_sum_ += 1.0 - similarity(c, x);
    selected_.push_back(c);
    lexical_.add(tokens_[c]);
  }

  DiversityScore current() const {
    const std::size_t m = selected_.size();
    const double syntactic = m < 2 ? 1.0 : pair_sum_ / static_cast<double>(m * (m - 1) / 2);
    return make_diversity(syntactic, lexical_.diversity());
  }

 private:
  double similarity(std::size_t i, std::size_t j) {
    double& cached = sim_[i * n_ + j];
    if (cached < 0.0) {
      cached = syntactic_similarity(trees_[i], trees_[j], self_[i], self_[j]);
      sim_[j * n_ + i] = cached;
    }
    return cached;
  }

  std::size_t n_;
  std::vector<LabeledTree> trees_;
  std::vector<std::vector<std::string>> tokens_;
  std::vector<double> self_;
  std::vector<double> sim_;
  std::vector<std::size_t> selected_;
  double pair_sum_ = 0.0;
  NgramPool lexical_;
};

}  // namespace

DiversityScore list_diversity(const Sentence& context, std::span<const Sentence* const> items,
                              const SelectionConfig& cfg) {
  ListState state(context, items, cfg);
  for (std::size_t i = 0; i < items.size(); ++i) state.select(i + 1);
  return state.current();
}

SuggestionList greedy_select(std::span<const ScoredCandidate> ranked, const Query& q,
                             const Corpus& corpus, const SelectionConfig& cfg) {
  q.validate();
  const std::size_t pool_size = std::min(ranked.size(), q.window);
  std::vector<const Sentence*> pool(pool_size);
  std::vector<std::string> keys(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) {
    pool[i] = &corpus.at(ranked[i].sentence_id);
    keys[i] = dedup_key(*pool[i]);
  }

  ListState state(q.context, pool, cfg);
  std::vector<std::string> taken_keys{dedup_key(q.context)};
  std::vector<bool> used(pool_size, false);

  SuggestionList out;
  out.word = q.word;
  out.context = q.context.surface();
  out.target_level = q.target_level;
  out.k = q.k;
  out.window = q.window;
  out.candidate_count = ranked.size();

  for (std::size_t step = 0; step < q.k; ++step) {
    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (std::size_t i = 0; i < pool_size; ++i) {
      if (used[i]) continue;
      if (std::find(taken_keys.begin(), taken_keys.end(), keys[i]) != taken_keys.end()) continue;
      const double score = state.with(i + 1).combined;
      // strict '>' keeps the higher-ranked entry on ties
      if (!best || score > best_score) {
        best = i;
        best_score = score;
      }
    }
    if (!best) break;
    used[*best] = true;
    taken_keys.push_back(keys[*best]);
    state.select(*best + 1);

    ScoredCandidate scored = ranked[*best];
    scored.selected_rank = step + 1;
    out.items.push_back({*pool[*best], scored});
  }

  out.truncated = out.items.size() < q.k;
  out.diversity = state.current();
  return out;
}

SuggestionList suggest(const Query& q, const InvertedIndex& index, const Corpus& corpus,
                       EmbeddingProvider& provider, const SelectionConfig& cfg) {
  q.validate();
  const QueryLemma lemma = lemmatize_query(q.word, q.context);
  const auto ids = lookup(index, lemma);
  if (ids.empty()) {
    SuggestionList out;
    out.word = q.word;
    out.context = q.context.surface();
    out.target_level = q.target_level;
    out.k = q.k;
    out.window = q.window;
    out.lemma = lemma;
    out.truncated = true;
    out.empty_reason = "no indexed sentence contains '" + lemma.content_lemma + "'";
    out.diversity = list_diversity(q.context, {}, cfg);
    return out;
  }
  const auto ranked = rank_candidates(ids, q, lemma, corpus, provider, cfg);
  SuggestionList out = greedy_select(ranked, q, corpus, cfg);
  out.lemma = lemma;
  if (out.items.empty()) out.empty_reason = "every candidate duplicates the context sentence";
  return out;
}

}  // namespace reibun
