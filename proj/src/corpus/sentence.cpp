#include "reibun/sentence.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace reibun {

namespace {

constexpr std::array<std::pair<Upos, std::string_view>, 17> kUposNames{{
    {Upos::ADJ, "ADJ"},     {Upos::ADP, "ADP"},   {Upos::ADV, "ADV"},
    {Upos::AUX, "AUX"},     {Upos::CCONJ, "CCONJ"}, {Upos::DET, "DET"},
    {Upos::INTJ, "INTJ"},   {Upos::NOUN, "NOUN"}, {Upos::NUM, "NUM"},
    {Upos::PART, "PART"},   {Upos::PRON, "PRON"}, {Upos::PROPN, "PROPN"},
    {Upos::PUNCT, "PUNCT"}, {Upos::SCONJ, "SCONJ"}, {Upos::SYM, "SYM"},
    {Upos::VERB, "VERB"},   {Upos::X, "X"},
}};

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::N5: return "N5";
    case Level::N4: return "N4";
    case Level::N3: return "N3";
    case Level::N2: return "N2";
    case Level::N1: return "N1";
  }
  return "?";
}

std::optional<Level> parse_level(std::string_view text) {
  for (Level level : kAllLevels) {
    if (text == to_string(level)) return level;
  }
  if (text.size() == 2 && text[0] == 'n') {
    std::string upper{"N"};
    upper += text[1];
    return parse_level(upper);
  }
  return std::nullopt;
}

std::string_view to_string(Upos upos) {
  for (const auto& [tag, name] : kUposNames) {
    if (tag == upos) return name;
  }
  return "X";
}

std::optional<Upos> parse_upos(std::string_view text) {
  for (const auto& [tag, name] : kUposNames) {
    if (name == text) return tag;
  }
  return std::nullopt;
}

std::string_view to_string(Source source) {
  switch (source) {
    case Source::jpwac: return "jpwac";
    case Source::tatoeba: return "tatoeba";
    case Source::wikipedia: return "wikipedia";
    case Source::other: return "other";
  }
  return "other";
}

Source parse_source(std::string_view text) {
  if (text == "jpwac") return Source::jpwac;
  if (text == "tatoeba") return Source::tatoeba;
  if (text == "wikipedia") return Source::wikipedia;
  return Source::other;
}

std::string Sentence::surface() const {
  std::string out;
  for (const auto& token : tokens) out += token.surface;
  return out;
}

std::size_t Sentence::root() const {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].head) return i;
  }
  throw TreeError("sentence " + std::to_string(id) + " has no root");
}

std::vector<std::vector<std::size_t>> Sentence::children() const {
  std::vector<std::vector<std::size_t>> out(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].head && *tokens[i].head < tokens.size()) {
      out[*tokens[i].head].push_back(i);
    }
  }
  return out;
}

std::optional<std::string> validate_tree(const std::vector<Token>& tokens) {
  if (tokens.empty()) return "sentence has no tokens";
  std::size_t roots = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& head = tokens[i].head;
    if (!head) {
      ++roots;
    } else if (*head >= tokens.size()) {
      return "token " + std::to_string(i + 1) + " has head out of range";
    } else if (*head == i) {
      return "token " + std::to_string(i + 1) + " is its own head";
    }
  }
  if (roots != 1) return "expected exactly one root, found " + std::to_string(roots);

  // Walk up from every token; a path longer than the sentence is a cycle.
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::size_t cursor = i;
    std::size_t steps = 0;
    while (tokens[cursor].head) {
      cursor = *tokens[cursor].head;
      if (++steps > tokens.size()) {
        return "cyclic heads involving token " + std::to_string(i + 1);
      }
    }
  }
  return std::nullopt;
}

Corpus::Corpus(std::vector<Sentence> sentences) : sentences_(std::move(sentences)) {
  by_id_.reserve(sentences_.size());
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    by_id_.emplace_back(sentences_[i].id, i);
  }
  std::sort(by_id_.begin(), by_id_.end());
  auto dup = std::adjacent_find(by_id_.begin(), by_id_.end(),
                                [](const auto& a, const auto& b) { return a.first == b.first; });
  if (dup != by_id_.end()) {
    throw std::invalid_argument("duplicate sentence id " + std::to_string(dup->first));
  }
}

const Sentence* Corpus::find(SentenceId id) const {
  auto it = std::lower_bound(by_id_.begin(), by_id_.end(), std::make_pair(id, std::size_t{0}));
  if (it == by_id_.end() || it->first != id) return nullptr;
  return &sentences_[it->second];
}

const Sentence& Corpus::at(SentenceId id) const {
  const Sentence* s = find(id);
  if (!s) throw std::out_of_range("no sentence with id " + std::to_string(id));
  return *s;
}

}  // namespace reibun
