#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "reibun/engine.hpp"
#include "reibun/unicode.hpp"

namespace reibun {

namespace {

std::string required_string(const Json& j, const char* key) {
  if (!j.is_object()) throw RequestError(400, "bad_request", "request body must be a JSON object");
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw RequestError(400, "bad_request", fmt::format("field '{}' is required and must be a string", key));
  }
  return it->get<std::string>();
}

std::size_t optional_count(const Json& j, const char* key, std::size_t fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_number_integer() || it->get<std::int64_t>() <= 0) {
    throw RequestError(400, "bad_request", fmt::format("field '{}' must be a positive integer", key));
  }
  return it->get<std::size_t>();
}

Level required_level(const Json& j, const char* key) {
  const std::string text = required_string(j, key);
  auto level = parse_level(text);
  if (!level) throw RequestError(400, "bad_request", fmt::format("unknown level '{}'", text));
  return *level;
}

bool looks_like_conllu(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.front() != '#') return line.starts_with("1\t");
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return false;
}

std::string trim(std::string_view s) {
  auto cps = unicode::decode(s);
  std::size_t b = 0, e = cps.size();
  while (b < e && unicode::is_whitespace(cps[b])) ++b;
  while (e > b && unicode::is_whitespace(cps[e - 1])) --e;
  return unicode::encode(std::u32string_view(cps).substr(b, e - b));
}

std::unique_ptr<EmbeddingProvider> make_provider(const EngineConfig& cfg, bool& degraded) {
  degraded = false;
  switch (cfg.embedding_mode) {
    case EmbeddingMode::Stub:
      return std::make_unique<StubEmbeddings>(cfg.stub_dimension, cfg.stub_seed);
    case EmbeddingMode::Precomputed:
      return PrecomputedEmbeddings::load(cfg.embeddings);
    case EmbeddingMode::Remote: {
      RemoteEmbeddingConfig rc;
      rc.base_url = cfg.annotator_url;
      rc.timeout = cfg.annotator_timeout;
      rc.max_in_flight = cfg.annotator_max_in_flight;
      try {
        return std::make_unique<RemoteEmbeddings>(rc);
      } catch (const EmbeddingError& e) {
        if (cfg.embeddings.empty()) throw;
        spdlog::warn("annotator unavailable ({}); serving precomputed embeddings from {}", e.what(),
                     cfg.embeddings.string());
        degraded = true;
        return PrecomputedEmbeddings::load(cfg.embeddings);
      }
    }
  }
  throw ConfigError("unknown embedding mode");
}

}  // namespace

std::vector<Sentence> load_corpus_file(const std::filesystem::path& path) {
  if (path.empty()) throw ConfigError("corpus.path is not set");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open corpus " + path.string());
  ParseResult parsed = parse_conllu(in);
  for (const auto& e : parsed.errors) {
    spdlog::warn("{}:{}: skipped sentence block {}: {}", path.string(), e.line, e.block, e.message);
  }
  return std::move(parsed.sentences);
}

std::unique_ptr<ChatEndpoint> default_chat_factory(const HttpChatConfig& cfg,
                                                   const std::filesystem::path& transcript) {
  if (!transcript.empty()) return std::make_unique<ScriptedChatEndpoint>(ScriptedChatEndpoint::load_transcript(transcript));
  return std::make_unique<HttpChatEndpoint>(cfg);
}

std::unique_ptr<Engine> Engine::open(EngineConfig cfg) {
  cfg.validate();
  Corpus corpus(load_corpus_file(cfg.corpus));
  InvertedIndex index;
  if (!cfg.index.empty()) {
    index = load_index(cfg.index);
    if (index.fingerprint() != corpus_fingerprint(corpus.sentences())) {
      throw IndexError("index " + cfg.index.string() + " was built from a different corpus");
    }
  } else {
    index = build_index(corpus.sentences(), cfg.threads);
  }
  bool degraded = false;
  auto provider = make_provider(cfg, degraded);
  return std::make_unique<Engine>(std::move(cfg), std::move(corpus), std::move(index), std::move(provider),
                                  degraded);
}

Engine::Engine(EngineConfig cfg, Corpus corpus, InvertedIndex index, std::unique_ptr<EmbeddingProvider> provider,
               bool degraded)
    : cfg_(std::move(cfg)),
      corpus_(std::move(corpus)),
      index_(std::move(index)),
      provider_(std::move(provider)),
      degraded_(degraded),
      labels_(cfg_.label_map.empty() ? LabelMap::builtin() : LabelMap::load(cfg_.label_map)),
      annotator_(cfg_.annotator_url, cfg_.annotator_timeout) {
  selection_.difficulty = cfg_.difficulty;
  selection_.context_in_lexical = cfg_.context_in_lexical;
  selection_.labels = &labels_;
  selection_.granularity = cfg_.granularity;
  selection_.threads = cfg_.threads;

  for (const auto& s : corpus_.sentences()) by_surface_.emplace(dedup_key(s), s.id);

  stats_ = {{"corpus", to_json(corpus_stats(corpus_.sentences()))},
            {"index",
             {{"keys", index_.all_postings().size()},
              {"sentence_count", index_.sentence_count()},
              {"doc_count", index_.doc_count()},
              {"fingerprint", fmt::format("{:016x}", index_.fingerprint())},
              {"built_at", index_.built_at()}}},
            {"embedding", {{"mode", std::string(to_string(provider_->mode()))},
                           {"dimension", provider_->dimension()},
                           {"degraded", degraded_}}}};
}

Sentence Engine::resolve_context(std::string_view context) const {
  if (looks_like_conllu(context)) {
    ParseResult parsed = parse_conllu(context);
    if (!parsed.errors.empty()) {
      throw RequestError(400, "bad_context", "context CoNLL-U: " + parsed.errors.front().message);
    }
    if (parsed.sentences.empty()) throw RequestError(400, "bad_context", "context CoNLL-U holds no sentence");
    Sentence s = std::move(parsed.sentences.front());
    if (context.find("# sent_id") == std::string_view::npos) s.id = kContextSentenceId;
    return s;
  }

  const std::string text = trim(context);
  if (text.empty()) throw RequestError(400, "bad_context", "context is empty");
  if (auto it = by_surface_.find(unicode::nfkc(text)); it != by_surface_.end()) return corpus_.at(it->second);

  std::vector<Sentence> parsed = annotator_.parse(text);
  Sentence s = std::move(parsed.front());
  s.id = kContextSentenceId;
  return s;
}

Json Engine::suggest(const Json& request) const {
  Query q;
  q.word = required_string(request, "word");
  q.target_level = required_level(request, "level");
  q.k = optional_count(request, "k", cfg_.k);
  q.window = optional_count(request, "window", std::max(cfg_.window, q.k));
  if (q.window < q.k) throw RequestError(400, "bad_request", "window must be at least k");
  q.context = resolve_context(required_string(request, "context"));

  Json out = to_json(reibun::suggest(q, index_, corpus_, *provider_, selection_));
  out["provider"] = std::string(to_string(provider_->mode()));
  if (degraded_) out["degraded"] = true;
  return out;
}

Json Engine::generate(const Json& request) const {
  GenerationQuery q;
  q.word = required_string(request, "word");
  q.context = required_string(request, "context");
  q.target_level = required_level(request, "level");
  q.k = optional_count(request, "k", cfg_.k);

  GenerationConfig gen = cfg_.generation;
  if (auto it = request.find("profile"); it != request.end() && !it->is_null()) {
    const std::string p = it->is_string() ? it->get<std::string>() : "";
    if (p == "plain") gen.profile = PromptProfile::Plain;
    else if (p == "numbered_list") gen.profile = PromptProfile::NumberedList;
    else throw RequestError(400, "bad_request", "profile must be plain or numbered_list");
  }
  if (q.word.empty()) throw RequestError(400, "bad_request", "word is empty");

  auto endpoint = chat_factory_(cfg_.generation_endpoint, cfg_.generation_transcript);
  Json out = to_json(generate_examples(q, gen, *endpoint));
  out["query"] = {{"word", q.word}, {"context", q.context}, {"level", std::string(to_string(q.target_level))},
                  {"k", q.k}};
  out["prompt"] = build_prompt(q, gen.profile);
  return out;
}

Json Engine::judge(const Json& request) const {
  if (!request.is_object() || !request.contains("block")) {
    throw RequestError(400, "bad_request", "field 'block' is required");
  }
  const JudgeBlock block = judge_block_from_json(request.at("block"));
  JudgeConfig jc = cfg_.judge;
  jc.n_votes = static_cast<unsigned>(optional_count(request, "votes", jc.n_votes));
  auto endpoint = chat_factory_(cfg_.judge_endpoint, cfg_.judge_transcript);
  return to_json(judge_block(block, *endpoint, jc), block);
}

Json Engine::health() const {
  Json out{{"status", "ok"}, {"index_sentences", index_.sentence_count()}};
  if (degraded_) out["degraded"] = true;
  return out;
}

Json Engine::stats() const { return stats_; }

}  // namespace reibun
