#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reibun {

/// JLPT proficiency level. Underlying values are the difficulty ranks,
/// N5 (easiest) = 1 through N1 (hardest) = 5.
enum class Level : int { N5 = 1, N4 = 2, N3 = 3, N2 = 4, N1 = 5 };

constexpr int rank(Level level) { return static_cast<int>(level); }

std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view text);

inline constexpr Level kAllLevels[] = {Level::N5, Level::N4, Level::N3, Level::N2, Level::N1};

// Universal Dependencies coarse part-of-speech tags.
enum class Upos {
  ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM,
  PART, PRON, PROPN, PUNCT, SCONJ, SYM, VERB, X,
};

std::string_view to_string(Upos upos);
std::optional<Upos> parse_upos(std::string_view text);

enum class Source { jpwac, tatoeba, wikipedia, other };

std::string_view to_string(Source source);
/// Unknown source names map to Source::other.
Source parse_source(std::string_view text);

using SentenceId = std::uint32_t;

struct Token {
  std::string surface;
  std::string lemma;
  Upos upos = Upos::X;
  /// 0-based index of the governing token; nullopt marks the root.
  std::optional<std::size_t> head;
  std::string deprel;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  SentenceId id = 0;
  std::vector<Token> tokens;
  Source source = Source::other;
  std::optional<Level> level;

  /// Token surfaces concatenated without separators.
  std::string surface() const;

  /// Index of the unique root token. Throws if the sentence has none.
  std::size_t root() const;

  /// Children of each token, in ascending token order.
  std::vector<std::vector<std::size_t>> children() const;

  bool operator==(const Sentence&) const = default;
};

/// Thrown when a sentence violates the dependency-tree invariants.
class TreeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checks heads are in range, there is exactly one root and the head
/// relation is acyclic. Returns an explanation on failure.
std::optional<std::string> validate_tree(const std::vector<Token>& tokens);

/// Sentences indexed by id. Immutable once built.
class Corpus {
 public:
  Corpus() = default;
  /// Throws std::invalid_argument on duplicate ids.
  explicit Corpus(std::vector<Sentence> sentences);

  const Sentence* find(SentenceId id) const;
  const Sentence& at(SentenceId id) const;

  std::size_t size() const { return sentences_.size(); }
  bool empty() const { return sentences_.empty(); }
  const std::vector<Sentence>& sentences() const { return sentences_; }

 private:
  std::vector<Sentence> sentences_;
  // (id, position) sorted by id
  std::vector<std::pair<SentenceId, std::size_t>> by_id_;
};

}  // namespace reibun
