#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "reibun/sentence.hpp"

namespace reibun {

// ---------------------------------------------------------------------------
// CoNLL-U ingestion
// ---------------------------------------------------------------------------

struct ParseError {
  std::size_t line = 0;  // 1-based line number of the offending line
  std::size_t block = 0; // 0-based index of the sentence block
  std::string message;
};

struct ParseResult {
  std::vector<Sentence> sentences;
  std::vector<ParseError> errors;
};

/// Reads CoNLL-U text. Every malformed block produces one ParseError and
/// no sentence; well-formed blocks are returned in input order. Whether a
/// non-empty error list aborts is up to the caller.
///
/// Sentence ids come from `# sent_id = <n>` when it holds a non-negative
/// integer, otherwise from the 0-based block position. `# level = Nx` and
/// `# source = name` populate the level and source. Multiword-token lines
/// (`1-2`) and empty nodes (`1.1`) are skipped.
ParseResult parse_conllu(std::istream& in);
ParseResult parse_conllu(std::string_view text);

void write_conllu(std::ostream& out, const Sentence& sentence);
std::string serialize_conllu(const std::vector<Sentence>& sentences);

// ---------------------------------------------------------------------------
// Well-formedness filters
// ---------------------------------------------------------------------------

enum class FilterReason { Ok, TooShort, TooLong, ExcessPunctNum, ForeignScript, BadEnding, Duplicate };

std::string_view to_string(FilterReason reason);

struct FilterVerdict {
  bool accepted = true;
  FilterReason reason = FilterReason::Ok;

  static FilterVerdict ok() { return {}; }
  static FilterVerdict reject(FilterReason r) { return {false, r}; }
  bool operator==(const FilterVerdict&) const = default;
};

struct FilterConfig {
  std::size_t min_tokens = 5;
  std::size_t max_tokens = 50;
  /// Sentences are kept only when the PUNCT/NUM/SYM token share is strictly
  /// below this value.
  double max_punct_num_ratio = 0.20;
  /// Sentence-final particles accepted in place of a predicate.
  std::set<std::string> final_particles{"よ", "ね"};
};

/// Applies the length, punctuation/numeral ratio, script and ending rules in
/// that order; the first failing rule names the rejection reason.
FilterVerdict well_formed(const Sentence& s, const FilterConfig& cfg = {});

/// Key used for duplicate detection: NFKC-normalised surface.
std::string dedup_key(const Sentence& s);

/// Streaming first-occurrence deduplication.
class Deduplicator {
 public:
  /// Returns true the first time a key is seen.
  bool admit(const Sentence& s);
  std::size_t seen() const { return seen_.size(); }

 private:
  std::unordered_set<std::string> seen_;
};

std::vector<Sentence> dedup(std::vector<Sentence> sentences);

/// Well-formedness plus deduplication with per-reason counters.
class CorpusFilter {
 public:
  explicit CorpusFilter(FilterConfig cfg = {}) : cfg_(std::move(cfg)) {}

  FilterVerdict check(const Sentence& s);
  std::vector<Sentence> apply(std::vector<Sentence> sentences);

  const std::map<FilterReason, std::size_t>& counts() const { return counts_; }

 private:
  FilterConfig cfg_;
  Deduplicator dedup_;
  std::map<FilterReason, std::size_t> counts_;
};

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

struct SourceStats {
  std::size_t sentence_count = 0;
  double avg_tokens = 0.0;
  double kanji_ratio = 0.0;
  /// Share of all sentences that come from this source.
  double share = 0.0;
};

struct CorpusStats {
  std::size_t sentence_count = 0;
  double avg_tokens = 0.0;
  double kanji_ratio = 0.0;
  std::map<Source, SourceStats> per_source;
};

class StatsAccumulator {
 public:
  void add(const Sentence& s);
  void merge(const StatsAccumulator& other);
  CorpusStats result() const;

 private:
  struct Totals {
    std::size_t sentences = 0;
    std::size_t tokens = 0;
    std::size_t kanji = 0;
    std::size_t chars = 0;
  };
  Totals all_;
  std::map<Source, Totals> by_source_;
};

CorpusStats corpus_stats(const std::vector<Sentence>& sentences);

}  // namespace reibun
