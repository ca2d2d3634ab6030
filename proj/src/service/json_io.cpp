#include <cmath>


#include "reibun/engine.hpp"

namespace reibun {

namespace {

Json level_or_null(const std::optional<Level>& l) {
  return l ? Json(std::string(to_string(*l))) : Json(nullptr);
}

template <typename T>
Json or_unclear(const std::optional<T>& v) {
  if (!v) return "unclear";
  if constexpr (std::is_same_v<T, bool>) {
    return *v;
  } else if constexpr (std::is_same_v<T, std::string>) {
    return *v;
  } else {
    return std::string(to_string(*v));
  }
}

// An unbounded F statistic is reported as null.
Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json to_json(const DiversityScore& d) {
  return {{"syntactic", d.syntactic}, {"lexical", d.lexical}, {"combined", d.combined}};
}

Json to_json(const SuggestionList& list) {
  Json items = Json::array();
  for (const auto& item : list.items) {
    const auto& s = item.score;
    items.push_back({
        {"rank", s.selected_rank ? Json(*s.selected_rank) : Json(nullptr)},
        {"sentence_id", s.sentence_id},
        {"text", item.sentence.surface()},
        {"level", level_or_null(item.sentence.level)},
        {"source", std::string(to_string(item.sentence.source))},
        {"target_span", {s.target_span.begin, s.target_span.end}},
        {"scores", {{"difficulty", s.difficulty_score}, {"sense", s.sense_score}, {"quality", s.quality}}},
    });
  }
  return {
      {"query",
       {{"word", list.word}, {"context", list.context}, {"level", std::string(to_string(list.target_level))},
        {"k", list.k}, {"window", list.window}}},
      {"lemma",
       {{"content", list.lemma.content_lemma},
        {"auxiliaries", list.lemma.auxiliaries},
        {"display", list.lemma.display()}}},
      {"items", std::move(items)},
      {"diversity", to_json(list.diversity)},
      {"candidate_count", list.candidate_count},
      {"truncated", list.truncated},
      {"empty_reason", list.empty_reason ? Json(*list.empty_reason) : Json(nullptr)},
  };
}

Json to_json(const GenerationResult& r) {
  return {{"sentences", r.sentences},
          {"rounds", r.rounds},
          {"partial", r.partial},
          {"dropped_duplicates", r.dropped_duplicates},
          {"dropped_missing_word", r.dropped_missing_word}};
}

Json to_json(const JudgeRating& rating, const JudgeBlock& block) {
  Json systems = Json::array();
  for (std::size_t i = 0; i < rating.systems.size(); ++i) {
    Json sentences = Json::array();
    for (const auto& s : rating.systems[i].sentences) {
      sentences.push_back({{"level", std::string(to_string(s.level))},
                           {"sense", std::string(to_string(s.sense))},
                           {"reject", s.reject}});
    }
    systems.push_back({{"system_id", block.systems.at(i).system_id},
                       {"syntax_diversity", std::string(to_string(rating.systems[i].syntax_diversity))},
                       {"sentences", std::move(sentences)}});
  }
  return {{"systems", std::move(systems)}, {"ranking", rating.ranking}, {"comment", rating.comment}};
}

Json to_json(const JudgeOutcome& outcome, const JudgeBlock& block) {
  Json presented = Json::array();
  for (std::size_t i : outcome.presented) presented.push_back(block.systems.at(i).system_id);

  Json votes = Json::array();
  Json errors = Json::array();
  for (std::size_t i = 0; i < outcome.votes.size(); ++i) {
    votes.push_back(outcome.votes[i] ? to_json(*outcome.votes[i], block) : Json(nullptr));
    errors.push_back(outcome.vote_errors[i].empty() ? Json(nullptr) : Json(outcome.vote_errors[i]));
  }

  Json systems = Json::array();
  for (std::size_t i = 0; i < outcome.majority.systems.size(); ++i) {
    const auto& ms = outcome.majority.systems[i];
    Json sentences = Json::array();
    for (std::size_t j = 0; j < ms.sentences.size(); ++j) {
      const auto& s = ms.sentences[j];
      sentences.push_back({{"text", block.systems[i].sentences.at(j)},
                           {"level", or_unclear(s.level)},
                           {"sense", or_unclear(s.sense)},
                           {"reject", or_unclear(s.reject)}});
    }
    systems.push_back({{"system_id", block.systems[i].system_id},
                       {"syntax_diversity", or_unclear(ms.syntax_diversity)},
                       {"sentences", std::move(sentences)}});
  }
  Json ranking = Json::array();
  for (const auto& r : outcome.majority.ranking) ranking.push_back(or_unclear(r));

  return {{"block_id", block.block_id},
          {"presented", std::move(presented)},
          {"votes", std::move(votes)},
          {"vote_errors", std::move(errors)},
          {"majority", {{"systems", std::move(systems)}, {"ranking", std::move(ranking)}}}};
}

Json to_json(const IccResult& r) {
  return {{"estimate", r.estimate},
          {"ci_low", r.ci_low},
          {"ci_high", r.ci_high},
          {"f", finite_or_null(r.f_value)},
          {"p_value", r.p_value},
          {"df", {r.df1, r.df2}},
          {"n_targets", r.n_targets},
          {"n_raters", r.n_raters},
          {"significant", r.significant()}};
}

Json to_json(const PairwiseAgreement& p) {
  const std::size_t k = p.rater_ids.size();
  Json rows = Json::array();
  for (std::size_t i = 0; i < k; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < k; ++j) row.push_back(p.at(i, j) ? to_json(*p.at(i, j)) : Json(nullptr));
    rows.push_back(std::move(row));
  }
  return {{"raters", p.rater_ids}, {"cells", std::move(rows)}};
}

Json to_json(const CorpusStats& s) {
  Json per_source = Json::object();
  for (const auto& [source, st] : s.per_source) {
    per_source[std::string(to_string(source))] = {{"sentence_count", st.sentence_count},
                                                  {"avg_tokens", st.avg_tokens},
                                                  {"kanji_ratio", st.kanji_ratio},
                                                  {"share", st.share}};
  }
  return {{"sentence_count", s.sentence_count},
          {"avg_tokens", s.avg_tokens},
          {"kanji_ratio", s.kanji_ratio},
          {"per_source", std::move(per_source)}};
}

JudgeBlock judge_block_from_json(const Json& j) {
  auto bad = [](const std::string& what) { return RequestError(400, "bad_block", what); };
  if (!j.is_object()) throw bad("block must be a JSON object");
  JudgeBlock b;
  try {
    b.block_id = j.value("block_id", std::string());
    b.word = j.at("word").get<std::string>();
    b.context = j.at("context").get<std::string>();
    auto level = parse_level(j.at("target_level").get<std::string>());
    if (!level) throw bad("unknown target_level " + j.at("target_level").dump());
    b.target_level = *level;
    for (const auto& s : j.at("systems")) {
      b.systems.push_back({s.at("system_id").get<std::string>(), s.at("sentences").get<std::vector<std::string>>()});
    }
  } catch (const Json::exception& e) {
    throw bad(std::string("block does not match the schema: ") + e.what());
  }
  try {
    b.validate();
  } catch (const std::invalid_argument& e) {
    throw bad(e.what());
  }
  return b;
}

Json error_envelope(std::string_view code, std::string_view message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

std::pair<int, Json> describe_error(std::exception_ptr e) {
  auto out = [](int status, std::string_view code, std::string_view msg) {
    return std::pair<int, Json>{status, error_envelope(code, msg)};
  };
  try {
    std::rethrow_exception(e);
  } catch (const RequestError& x) {
    return out(x.status(), x.code(), x.what());
  } catch (const Json::exception& x) {
    return out(400, "bad_request", x.what());
  } catch (const QueryError& x) {
    return out(422, x.kind() == QueryError::Kind::NotInContext ? "not_in_context" : "no_content_lemma", x.what());
  } catch (const AnnotatorError& x) {
    switch (x.kind()) {
      case AnnotatorError::Kind::Unreachable:
      case AnnotatorError::Kind::Timeout: return out(503, "annotator_unavailable", x.what());
      case AnnotatorError::Kind::Rejected: return out(422, "annotator_rejected", x.what());
      case AnnotatorError::Kind::BadResponse: return out(502, "annotator_bad_response", x.what());
    }
  } catch (const MissingEmbedding& x) {
    return out(422, "missing_embedding", x.what());
  } catch (const ServiceUnreachable& x) {
    return out(503, "embedding_unavailable", x.what());
  } catch (const ServiceTimeout& x) {
    return out(503, "embedding_timeout", x.what());
  } catch (const EmbeddingError& x) {
    return out(500, "embedding_error", x.what());
  } catch (const JudgeError& x) {
    return out(502, "judge_failed", x.what());
  } catch (const ChatError& x) {
    return out(502, "chat_endpoint_error", x.what());
  } catch (const DegenerateError& x) {
    return out(422, "degenerate", x.what());
  } catch (const RatingsFormatError& x) {
    return out(400, "bad_ratings", x.what());
  } catch (const ConfigError& x) {
    return out(500, "config_error", x.what());
  } catch (const IndexError& x) {
    return out(500, "index_error", x.what());
  } catch (const std::invalid_argument& x) {
    return out(400, "invalid_argument", x.what());
  } catch (const std::exception& x) {
    return out(500, "internal", x.what());
  } catch (...) {
    return out(500, "internal", "unknown error");
  }
  return out(500, "internal", "unknown error");
}

}  // namespace reibun
