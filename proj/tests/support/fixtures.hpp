#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "reibun/diversity.hpp"
#include "reibun/sentence.hpp"

namespace reibun::testing {

struct TokenSpec {
  std::string surface;
  std::string lemma;
  Upos upos;
  std::size_t head;  // 1-based, 0 = root
  std::string deprel;
};

Sentence make_sentence(SentenceId id, const std::vector<TokenSpec>& tokens,
                       std::optional<Level> level = std::nullopt, Source source = Source::other);

/// Token list with the given UPOS tags, chained to a single root; surfaces
/// are "w0", "w1", ... unless given.
Sentence sentence_with_upos(const std::vector<Upos>& upos, const std::vector<std::string>& surfaces = {});

/// Small Japanese grammar: verb-final clauses with case-marked arguments,
/// adjectives, noun compounds, adverbs and auxiliaries.
class SentenceGenerator {
 public:
  explicit SentenceGenerator(std::uint64_t seed);
  Sentence next(SentenceId id);
  /// A sentence that uses the verb with this lemma.
  Sentence next_with_verb(SentenceId id, const std::string& verb_lemma);

  static const std::vector<std::string>& verb_lemmas();
  static const std::vector<std::string>& noun_lemmas();

 private:
  Sentence build(SentenceId id, std::optional<std::size_t> verb);
  std::mt19937_64 rng_;
};

/// n distinct (by NFKC surface) sentences with ids 0..n-1.
std::vector<Sentence> synthetic_corpus(std::size_t n, std::uint64_t seed);

/// Random ordered tree with 1..max_nodes nodes, labels drawn from `alphabet`.
LabeledTree random_tree(std::mt19937_64& rng, std::size_t max_nodes, const std::vector<std::string>& alphabet);

}  // namespace reibun::testing
