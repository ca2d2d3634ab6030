#include <algorithm>
#include <exception>
#include <thread>

#include <spdlog/spdlog.h>

#include "reibun/corpus.hpp"
#include "reibun/selection.hpp"

namespace reibun {

namespace {

bool is_nominal(Upos upos) { return upos == Upos::NOUN || upos == Upos::PROPN; }

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) fn(i);
    });
  }
}

}  // namespace

void Query::validate() const {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (window < k) throw std::invalid_argument("window must be at least k");
}

std::optional<TokenSpan> find_target_span(const Sentence& s, std::string_view key) {
  const auto& tokens = s.tokens;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (is_content_pos(tokens[i].upos) && tokens[i].lemma == key) return TokenSpan{i, i + 1};
  }
  for (std::size_t i = 0; i < tokens.size();) {
    if (!is_nominal(tokens[i].upos)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::string compound;
    while (j < tokens.size() && is_nominal(tokens[j].upos)) compound += tokens[j++].lemma;
    if (j - i >= 2 && compound == key) return TokenSpan{i, j};
    i = j;
  }
  return std::nullopt;
}

std::vector<ScoredCandidate> rank_candidates(std::span<const SentenceId> ids, const Query& q,
                                             const QueryLemma& lemma, const Corpus& corpus,
                                             EmbeddingProvider& provider,
                                             const SelectionConfig& cfg) {
  const TargetEmbedding context_vec =
      embed_target(provider, q.context, {lemma.span_begin, lemma.span_end});
  const std::string context_key = dedup_key(q.context);

  struct Slot {
    const Sentence* sentence = nullptr;
    std::optional<ScoredCandidate> scored;
    std::exception_ptr error;
  };
  std::vector<Slot> slots;
  slots.reserve(ids.size());
  for (SentenceId id : ids) {
    const Sentence* s = corpus.find(id);
    if (!s) {
      spdlog::warn("index references sentence {} missing from the corpus", id);
      continue;
    }
    if (dedup_key(*s) == context_key) continue;
    slots.push_back({s, std::nullopt, nullptr});
  }

  parallel_for(slots.size(), cfg.threads, [&](std::size_t i) {
    Slot& slot = slots[i];
    const Sentence& s = *slot.sentence;
    auto span = find_target_span(s, lemma.content_lemma);
    if (!span) {
      spdlog::warn("sentence {} lacks key '{}'", s.id, lemma.content_lemma);
      return;
    }
    try {
      const TargetEmbedding vec = embed_target(provider, s, *span);
      ScoredCandidate c;
      c.sentence_id = s.id;
      c.difficulty_score = difficulty_score(q.target_level, s.level, cfg.difficulty);
      c.sense_score = sense_similarity(context_vec, vec);
      c.quality = combined_quality(c.difficulty_score, c.sense_score);
      c.target_span = *span;
      slot.scored = c;
    } catch (const EmbeddingError&) {
      slot.error = std::current_exception();
    }
  });

  std::vector<ScoredCandidate> ranked;
  std::exception_ptr first_error;
  std::size_t failures = 0;
  for (auto& slot : slots) {
    if (slot.scored) ranked.push_back(*slot.scored);
    if (slot.error) {
      ++failures;
      if (!first_error) first_error = slot.error;
    }
  }
  if (failures > 0) {
    if (ranked.size() < q.window) std::rethrow_exception(first_error);
    spdlog::warn("dropped {} candidates whose embeddings failed", failures);
  }

  std::sort(ranked.begin(), ranked.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.quality != b.quality) return a.quality > b.quality;
    return a.sentence_id < b.sentence_id;
  });
  return ranked;
}

}  // namespace reibun
