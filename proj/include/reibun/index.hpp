#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reibun/sentence.hpp"

namespace reibun {

/// Content tokens contribute their lemma as an index key.
bool is_content_pos(Upos upos);

/// Lemma of every content token plus one concatenated key per maximal run
/// of two or more consecutive NOUN/PROPN tokens.
std::set<std::string> lemma_keys(const Sentence& s);

/// Content lemma of a query word plus the auxiliaries that inflect it,
/// e.g. たべた -> 食べる + [た].
struct QueryLemma {
  std::string content_lemma;
  std::vector<std::string> auxiliaries;
  /// Token range [begin, end) of the located word inside the context.
  std::size_t span_begin = 0;
  std::size_t span_end = 0;

  /// "食べる+た" style rendering.
  std::string display() const;
};

class QueryError : public std::runtime_error {
 public:
  enum class Kind { NotInContext, NoContentLemma };
  QueryError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(QueryError::Kind kind);

/// Locates the leftmost occurrence of `word` in the context surface and
/// lemmatises the tokens it overlaps. Throws QueryError.
QueryLemma lemmatize_query(std::string_view word, const Sentence& context);

class IndexError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Corruption or incompatibility detected while loading a saved index.
class IndexFormatError : public IndexError {
 public:
  using IndexError::IndexError;
};

/// Order-independent fingerprint of a corpus (ids, surfaces, levels).
std::uint64_t corpus_fingerprint(std::span<const Sentence> sentences);

class InvertedIndex {
 public:
  using Postings = std::unordered_map<std::string, std::vector<SentenceId>>;

  InvertedIndex() = default;

  /// Sentence ids containing `key`, ascending. Empty when the key is absent.
  std::span<const SentenceId> postings(std::string_view key) const;

  const Postings& all_postings() const { return postings_; }
  /// Upper bound on sentence ids: every posted id is < doc_count.
  std::uint64_t doc_count() const { return doc_count_; }
  std::uint64_t sentence_count() const { return sentence_count_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  const std::string& built_at() const { return built_at_; }

  /// Keys in lexicographic byte order.
  std::vector<std::string> sorted_keys() const;

  bool operator==(const InvertedIndex& other) const;

 private:
  friend InvertedIndex build_index(std::span<const Sentence>, unsigned);
  friend InvertedIndex load_index(const std::filesystem::path&);
  friend InvertedIndex read_index(std::istream&);

  Postings postings_;
  std::uint64_t doc_count_ = 0;
  std::uint64_t sentence_count_ = 0;
  std::uint64_t fingerprint_ = 0;
  std::string built_at_;
};

/// Builds the index, splitting the corpus across `threads` shards and
/// merging. Result is independent of input order and thread count.
/// Throws IndexError on duplicate ids.
InvertedIndex build_index(std::span<const Sentence> sentences, unsigned threads = 1);

std::span<const SentenceId> lookup(const InvertedIndex& ix, const QueryLemma& q);

inline constexpr std::uint32_t kIndexFormatVersion = 1;

void write_index(std::ostream& out, const InvertedIndex& ix);
InvertedIndex read_index(std::istream& in);
void save_index(const InvertedIndex& ix, const std::filesystem::path& path);
InvertedIndex load_index(const std::filesystem::path& path);

}  // namespace reibun
