#pragma once

#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

#include <json.hpp>

#include "reibun/annotator.hpp"
#include "reibun/config.hpp"
#include "reibun/corpus.hpp"
#include "reibun/embedding.hpp"
#include "reibun/evalstats.hpp"
#include "reibun/genclient.hpp"
#include "reibun/index.hpp"
#include "reibun/selection.hpp"

namespace reibun {

using Json = nlohmann::json;

/// Failure reported to API callers with an HTTP status and a stable code.
class RequestError : public std::runtime_error {
 public:
  RequestError(int status, std::string code, const std::string& what)
      : std::runtime_error(what), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

// JSON payloads shared by the CLI and the HTTP service.
Json to_json(const SuggestionList& list);
Json to_json(const GenerationResult& result);
Json to_json(const JudgeRating& rating, const JudgeBlock& block);
Json to_json(const JudgeOutcome& outcome, const JudgeBlock& block);
Json to_json(const IccResult& r);
Json to_json(const PairwiseAgreement& p);
Json to_json(const CorpusStats& s);
Json to_json(const DiversityScore& d);

/// Throws RequestError (400) on schema violations.
JudgeBlock judge_block_from_json(const Json& j);

Json error_envelope(std::string_view code, std::string_view message);

/// Maps an exception to (HTTP status, error envelope).
std::pair<int, Json> describe_error(std::exception_ptr e);

using ChatFactory = std::function<std::unique_ptr<ChatEndpoint>(const HttpChatConfig&,
                                                               const std::filesystem::path& transcript)>;

/// Default factory: a fresh ScriptedChatEndpoint when a transcript is set,
/// otherwise an HttpChatEndpoint.
std::unique_ptr<ChatEndpoint> default_chat_factory(const HttpChatConfig& cfg,
                                                   const std::filesystem::path& transcript);

/// Immutable query state (corpus, index, provider) plus request handlers.
/// Handlers are safe to call concurrently.
class Engine {
 public:
  /// Loads the corpus, loads or builds the index and sets up the embedding
  /// provider. In remote mode an unreachable annotator falls back to the
  /// precomputed file when one is configured (degraded mode).
  static std::unique_ptr<Engine> open(EngineConfig cfg);

  Engine(EngineConfig cfg, Corpus corpus, InvertedIndex index, std::unique_ptr<EmbeddingProvider> provider,
         bool degraded = false);

  /// {word, context, level, k?, window?} -> suggestion payload.
  Json suggest(const Json& request) const;
  /// {word, context, level, k?, profile?} -> generation payload.
  Json generate(const Json& request) const;
  /// {block, votes?} -> judge payload.
  Json judge(const Json& request) const;
  Json health() const;
  Json stats() const;

  /// Context given as CoNLL-U, as the text of a corpus sentence, or as raw
  /// text parsed by the annotator.
  Sentence resolve_context(std::string_view context) const;

  void set_chat_factory(ChatFactory f) { chat_factory_ = std::move(f); }

  const EngineConfig& config() const { return cfg_; }
  const Corpus& corpus() const { return corpus_; }
  const InvertedIndex& index() const { return index_; }
  EmbeddingProvider& provider() const { return *provider_; }
  bool degraded() const { return degraded_; }

 private:
  EngineConfig cfg_;
  Corpus corpus_;
  InvertedIndex index_;
  std::unique_ptr<EmbeddingProvider> provider_;
  bool degraded_ = false;
  LabelMap labels_;
  SelectionConfig selection_;
  AnnotatorClient annotator_;
  std::unordered_map<std::string, SentenceId> by_surface_;
  Json stats_;
  ChatFactory chat_factory_ = default_chat_factory;
};

/// Loads a CoNLL-U corpus; malformed blocks are logged and skipped.
/// Throws std::runtime_error when the file cannot be read.
std::vector<Sentence> load_corpus_file(const std::filesystem::path& path);

}  // namespace reibun
