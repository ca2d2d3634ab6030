#include "reibun/corpus.hpp"
#include "reibun/unicode.hpp"

namespace reibun {

void StatsAccumulator::add(const Sentence& s) {
  Totals t;
  t.sentences = 1;
  t.tokens = s.tokens.size();
  for (const auto& token : s.tokens) {
    for (char32_t cp : unicode::decode(token.surface)) {
      if (unicode::is_whitespace(cp)) continue;
      ++t.chars;
      if (unicode::is_kanji(cp)) ++t.kanji;
    }
  }
  for (Totals* dst : {&all_, &by_source_[s.source]}) {
    dst->sentences += t.sentences;
    dst->tokens += t.tokens;
    dst->kanji += t.kanji;
    dst->chars += t.chars;
  }
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
  auto add_totals = [](Totals& dst, const Totals& src) {
    dst.sentences += src.sentences;
    dst.tokens += src.tokens;
    dst.kanji += src.kanji;
    dst.chars += src.chars;
  };
  add_totals(all_, other.all_);
  for (const auto& [source, totals] : other.by_source_) add_totals(by_source_[source], totals);
}

CorpusStats StatsAccumulator::result() const {
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  CorpusStats out;
  out.sentence_count = all_.sentences;
  out.avg_tokens = ratio(all_.tokens, all_.sentences);
  out.kanji_ratio = ratio(all_.kanji, all_.chars);
  for (const auto& [source, t] : by_source_) {
    SourceStats& ss = out.per_source[source];
    ss.sentence_count = t.sentences;
    ss.avg_tokens = ratio(t.tokens, t.sentences);
    ss.kanji_ratio = ratio(t.kanji, t.chars);
    ss.share = ratio(t.sentences, all_.sentences);
  }
  return out;
}

CorpusStats corpus_stats(const std::vector<Sentence>& sentences) {
  StatsAccumulator acc;
  for (const auto& s : sentences) acc.add(s);
  return acc.result();
}

}  // namespace reibun
