#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reibun/sentence.hpp"

namespace reibun {

// ---------------------------------------------------------------- endpoints

struct ChatMessage {
  std::string role;
  std::string content;
  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 1.0;
  std::optional<double> repetition_penalty;
};

class ChatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ChatEndpoint {
 public:
  virtual ~ChatEndpoint() = default;
  /// Returns the assistant text. Throws ChatError.
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct HttpChatConfig {
  /// Prefix of the chat-completions route, e.g. "http://localhost:8000/v1".
  std::string base_url = "http://127.0.0.1:8000/v1";
  std::string model = "default";
  /// Sent as "Authorization: Bearer <key>" when non-empty.
  std::string api_key;
  std::chrono::milliseconds timeout{60000};
  unsigned max_retries = 2;
};

/// OpenAI-style POST {base_url}/chat/completions.
class HttpChatEndpoint final : public ChatEndpoint {
 public:
  explicit HttpChatEndpoint(HttpChatConfig cfg);
  std::string complete(const ChatRequest& request) override;

 private:
  HttpChatConfig cfg_;
};

/// Replays a fixed list of responses in order. Transcript JSON is either an
/// array of strings or {"responses": [...]} where each entry is a string or
/// {"response": "...", "expect": "substring of the last user message"}.
class ScriptedChatEndpoint final : public ChatEndpoint {
 public:
  struct Turn {
    std::string response;
    std::optional<std::string> expect;
  };

  explicit ScriptedChatEndpoint(std::vector<Turn> turns);
  /// Throws ChatError on malformed transcripts.
  static std::vector<Turn> parse_transcript(std::string_view json);
  static std::vector<Turn> load_transcript(const std::filesystem::path& path);

  /// Throws ChatError when the script is exhausted or an expectation fails.
  std::string complete(const ChatRequest& request) override;

  std::vector<ChatRequest> requests() const;
  std::size_t remaining() const;

 private:
  std::vector<Turn> turns_;
  std::size_t next_ = 0;
  std::vector<ChatRequest> seen_;
  mutable std::mutex mu_;
};

// --------------------------------------------------------------- generation

enum class PromptProfile {
  Plain,
  /// Adds an instruction asking for a numbered list with no translation.
  NumberedList,
};

struct GenerationConfig {
  double temperature = 1.0;
  std::optional<double> repetition_penalty;
  unsigned max_rounds = 4;
  PromptProfile profile = PromptProfile::Plain;

  /// Throws std::invalid_argument.
  void validate() const;

  static GenerationConfig with_repetition_penalty(double penalty = 5.0);
};

struct GenerationQuery {
  std::string word;
  std::string context;
  Level target_level = Level::N3;
  std::size_t k = 5;
};

/// Throws std::invalid_argument for an empty word or k == 0.
std::string build_prompt(const GenerationQuery& q, PromptProfile profile = PromptProfile::Plain);

/// Splits model output into candidate sentences: one per line, further split
/// after 。！？, with list markers ("1.", "2)", "・", ...) removed.
std::vector<std::string> split_completion(std::string_view text);

struct GenerationResult {
  std::vector<std::string> sentences;
  unsigned rounds = 0;
  /// Fewer than k sentences after max_rounds.
  bool partial = false;
  std::size_t dropped_duplicates = 0;
  std::size_t dropped_missing_word = 0;
};

/// Prompts repeatedly, keeping new sentences that contain the word, until k
/// are collected or max_rounds is reached. ChatError propagates.
GenerationResult generate_examples(const GenerationQuery& q, const GenerationConfig& cfg,
                                   ChatEndpoint& endpoint);

// -------------------------------------------------------------------- judge

struct SystemOutput {
  std::string system_id;
  std::vector<std::string> sentences;
};

/// One query with every system's sentences.
struct JudgeBlock {
  std::string block_id;
  std::string word;
  std::string context;
  Level target_level = Level::N3;
  std::vector<SystemOutput> systems;

  /// Throws std::invalid_argument on empty systems, duplicate ids or a
  /// system without sentences.
  void validate() const;
};

enum class Sense { Similar, NotSimilar };
enum class DiversityRating { Low, Medium, High };

std::string_view to_string(Sense s);
std::string_view to_string(DiversityRating d);
std::optional<Sense> parse_sense(std::string_view s);
std::optional<DiversityRating> parse_diversity_rating(std::string_view s);

struct SentenceRating {
  Level level = Level::N3;
  Sense sense = Sense::Similar;
  bool reject = false;
  bool operator==(const SentenceRating&) const = default;
};

struct SystemRating {
  std::vector<SentenceRating> sentences;
  DiversityRating syntax_diversity = DiversityRating::Medium;
  bool operator==(const SystemRating&) const = default;
};

/// One judge vote. `systems` follows the block's system order; `ranking`
/// lists system ids best first.
struct JudgeRating {
  std::vector<SystemRating> systems;
  std::vector<std::string> ranking;
  std::string comment;
  bool operator==(const JudgeRating&) const = default;
};

/// nullopt marks an Unclear item (no strict majority among valid votes).
struct MajoritySentence {
  std::optional<Level> level;
  std::optional<Sense> sense;
  std::optional<bool> reject;
};

struct MajoritySystem {
  std::vector<MajoritySentence> sentences;
  std::optional<DiversityRating> syntax_diversity;
};

struct MajorityRating {
  std::vector<MajoritySystem> systems;
  /// Majority system id at each ranking position.
  std::vector<std::optional<std::string>> ranking;
};

class JudgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct JudgeConfig {
  unsigned n_votes = 3;
  std::uint64_t seed = 20240611;
  double temperature = 0.0;
};

struct JudgeOutcome {
  /// presented[i] is the block index of the i-th system shown to the judge.
  std::vector<std::size_t> presented;
  /// One entry per request; nullopt for unparseable replies.
  std::vector<std::optional<JudgeRating>> votes;
  std::vector<std::string> vote_errors;
  MajorityRating majority;
};

/// Presentation order for a block: a seeded Fisher-Yates shuffle.
std::vector<std::size_t> presentation_order(std::size_t n_systems, std::uint64_t seed);

/// Judge instructions followed by the block, systems labelled A, B, C...
/// in `presented` order, and the JSON reply contract.
std::string build_judge_prompt(const JudgeBlock& block, std::span<const std::size_t> presented);

/// Parses a judge reply (the outermost {...} in the text) and maps labels
/// back to block order. Throws JudgeError.
JudgeRating parse_judge_reply(std::string_view reply, const JudgeBlock& block,
                              std::span<const std::size_t> presented);

/// Strict per-item majority over the valid votes. Throws JudgeError when
/// `votes` is empty.
MajorityRating majority_vote(std::span<const JudgeRating> votes, const JudgeBlock& block);

/// Issues cfg.n_votes sequential requests. Throws JudgeError if every
/// vote is invalid; ChatError propagates.
JudgeOutcome judge_block(const JudgeBlock& block, ChatEndpoint& endpoint,
                         const JudgeConfig& cfg = {});

}  // namespace reibun
