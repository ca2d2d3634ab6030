#include "reibun/corpus.hpp"
#include "reibun/unicode.hpp"

namespace reibun {

std::string_view to_string(FilterReason reason) {
  switch (reason) {
    case FilterReason::Ok: return "Ok";
    case FilterReason::TooShort: return "TooShort";
    case FilterReason::TooLong: return "TooLong";
    case FilterReason::ExcessPunctNum: return "ExcessPunctNum";
    case FilterReason::ForeignScript: return "ForeignScript";
    case FilterReason::BadEnding: return "BadEnding";
    case FilterReason::Duplicate: return "Duplicate";
  }
  return "?";
}

namespace {

bool is_punct_or_numeral(Upos upos) {
  return upos == Upos::PUNCT || upos == Upos::NUM || upos == Upos::SYM;
}

bool is_predicate(Upos upos) {
  return upos == Upos::VERB || upos == Upos::ADJ || upos == Upos::AUX;
}

bool good_ending(const Sentence& s, const FilterConfig& cfg) {
  auto last = s.tokens.rbegin();
  while (last != s.tokens.rend() && last->upos == Upos::PUNCT) ++last;
  if (last == s.tokens.rend()) return false;
  if (is_predicate(last->upos)) return true;
  return last->upos == Upos::PART && cfg.final_particles.contains(last->surface);
}

}  // namespace

FilterVerdict well_formed(const Sentence& s, const FilterConfig& cfg) {
  const std::size_t n = s.tokens.size();
  if (n < cfg.min_tokens) return FilterVerdict::reject(FilterReason::TooShort);
  if (n > cfg.max_tokens) return FilterVerdict::reject(FilterReason::TooLong);

  std::size_t punct_num = 0;
  for (const auto& t : s.tokens) punct_num += is_punct_or_numeral(t.upos) ? 1 : 0;
  if (static_cast<double>(punct_num) / static_cast<double>(n) >= cfg.max_punct_num_ratio) {
    return FilterVerdict::reject(FilterReason::ExcessPunctNum);
  }

  for (const auto& t : s.tokens) {
    if (unicode::contains_foreign_script(t.surface)) {
      return FilterVerdict::reject(FilterReason::ForeignScript);
    }
  }

  if (!good_ending(s, cfg)) return FilterVerdict::reject(FilterReason::BadEnding);
  return FilterVerdict::ok();
}

std::string dedup_key(const Sentence& s) { return unicode::nfkc(s.surface()); }

bool Deduplicator::admit(const Sentence& s) { return seen_.insert(dedup_key(s)).second; }

std::vector<Sentence> dedup(std::vector<Sentence> sentences) {
  Deduplicator seen;
  std::vector<Sentence> out;
  out.reserve(sentences.size());
  for (auto& s : sentences) {
    if (seen.admit(s)) out.push_back(std::move(s));
  }
  return out;
}

FilterVerdict CorpusFilter::check(const Sentence& s) {
  FilterVerdict verdict = well_formed(s, cfg_);
  if (verdict.accepted && !dedup_.admit(s)) verdict = FilterVerdict::reject(FilterReason::Duplicate);
  ++counts_[verdict.reason];
  return verdict;
}

std::vector<Sentence> CorpusFilter::apply(std::vector<Sentence> sentences) {
  std::vector<Sentence> kept;
  for (auto& s : sentences) {
    if (check(s).accepted) kept.push_back(std::move(s));
  }
  return kept;
}

}  // namespace reibun
