#include "reibun/index.hpp"

namespace reibun {

namespace {

bool is_nominal(Upos upos) { return upos == Upos::NOUN || upos == Upos::PROPN; }

}  // namespace

bool is_content_pos(Upos upos) {
  switch (upos) {
    case Upos::NOUN:
    case Upos::PROPN:
    case Upos::VERB:
    case Upos::ADJ:
    case Upos::ADV:
      return true;
    default:
      return false;
  }
}

std::set<std::string> lemma_keys(const Sentence& s) {
  std::set<std::string> keys;
  const auto& tokens = s.tokens;
  for (const auto& t : tokens) {
    if (is_content_pos(t.upos) && !t.lemma.empty()) keys.insert(t.lemma);
  }
  for (std::size_t i = 0; i < tokens.size();) {
    if (!is_nominal(tokens[i].upos)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::string compound;
    while (j < tokens.size() && is_nominal(tokens[j].upos)) compound += tokens[j++].lemma;
    if (j - i >= 2) keys.insert(std::move(compound));
    i = j;
  }
  return keys;
}

std::string QueryLemma::display() const {
  std::string out = content_lemma;
  for (const auto& aux : auxiliaries) out += "+" + aux;
  return out;
}

std::string_view to_string(QueryError::Kind kind) {
  switch (kind) {
    case QueryError::Kind::NotInContext: return "NotInContext";
    case QueryError::Kind::NoContentLemma: return "NoContentLemma";
  }
  return "?";
}

QueryLemma lemmatize_query(std::string_view word, const Sentence& context) {
  const std::string surface = context.surface();
  const std::size_t pos = word.empty() ? std::string::npos : surface.find(word);
  if (pos == std::string::npos) {
    throw QueryError(QueryError::Kind::NotInContext,
                     "word '" + std::string(word) + "' does not occur in the context sentence");
  }
  const std::size_t end = pos + word.size();

  // tokens overlapping the byte range [pos, end)
  std::size_t begin_tok = context.tokens.size();
  std::size_t end_tok = 0;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < context.tokens.size(); ++i) {
    std::size_t next = offset + context.tokens[i].surface.size();
    if (next > pos && offset < end) {
      begin_tok = std::min(begin_tok, i);
      end_tok = i + 1;
    }
    offset = next;
  }

  const auto& tokens = context.tokens;
  std::optional<std::size_t> chosen;
  std::string lemma;

  // compound noun inside the span
  for (std::size_t i = begin_tok; i < end_tok && !chosen; ++i) {
    if (!is_nominal(tokens[i].upos)) continue;
    std::size_t j = i;
    std::string compound;
    while (j < end_tok && is_nominal(tokens[j].upos)) compound += tokens[j++].lemma;
    if (j - i >= 2) {
      chosen = j - 1;
      lemma = std::move(compound);
    }
  }

  if (!chosen) {
    // prefer the content token whose head lies outside the span
    auto heads_outside = [&](std::size_t i) {
      const auto& head = tokens[i].head;
      return !head || *head < begin_tok || *head >= end_tok;
    };
    std::optional<std::size_t> first_content;
    for (std::size_t i = begin_tok; i < end_tok; ++i) {
      if (!is_content_pos(tokens[i].upos)) continue;
      if (!first_content) first_content = i;
      if (!chosen && heads_outside(i)) chosen = i;
    }
    if (!chosen) chosen = first_content;
    if (chosen) lemma = tokens[*chosen].lemma;
  }

  if (!chosen) {
    throw QueryError(QueryError::Kind::NoContentLemma,
                     "word '" + std::string(word) + "' covers only function tokens");
  }

  QueryLemma q;
  q.content_lemma = std::move(lemma);
  q.span_begin = begin_tok;
  q.span_end = end_tok;
  for (std::size_t i = *chosen + 1; i < end_tok; ++i) {
    if (tokens[i].upos == Upos::AUX) q.auxiliaries.push_back(tokens[i].lemma);
  }
  return q;
}

}  // namespace reibun
