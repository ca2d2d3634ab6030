#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reibun/corpus.hpp"
#include "reibun/diversity.hpp"
#include "reibun/genclient.hpp"
#include "reibun/scoring.hpp"

namespace reibun {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Values accepted by the config reader: a TOML subset with tables,
/// strings, integers, floats, booleans and single-line arrays.
struct TomlValue {
  enum class Kind { Bool, Int, Float, String, Array };
  Kind kind = Kind::String;
  bool b = false;
  std::int64_t i = 0;
  double f = 0.0;
  std::string s;
  std::vector<TomlValue> array;
};

/// Flattened document: "table.key" -> value. Throws ConfigError with a line
/// number on anything outside the subset.
std::map<std::string, TomlValue> parse_toml(std::string_view text);

/// Parses a lone TOML value ("30", "true", "[1, 2]", "\"x\"").
TomlValue parse_toml_value(std::string_view text);

enum class EmbeddingMode { Stub, Precomputed, Remote };

std::string_view to_string(EmbeddingMode m);

struct EngineConfig {
  std::filesystem::path corpus;
  /// Built in memory from the corpus when empty.
  std::filesystem::path index;

  FilterConfig filter;

  EmbeddingMode embedding_mode = EmbeddingMode::Stub;
  /// Precomputed vectors; also the fallback when the annotator is down.
  std::filesystem::path embeddings;
  std::size_t stub_dimension = 64;
  std::uint64_t stub_seed = 0x5eed;

  std::string annotator_url = "http://127.0.0.1:8765";
  std::chrono::milliseconds annotator_timeout{5000};
  std::size_t annotator_max_in_flight = 8;

  DifficultyConfig difficulty;
  std::size_t k = 5;
  std::size_t window = 50;
  bool context_in_lexical = true;
  LabelGranularity granularity = LabelGranularity::Relation;
  std::filesystem::path label_map;
  unsigned threads = 1;

  HttpChatConfig generation_endpoint;
  /// Scripted replies instead of the HTTP endpoint.
  std::filesystem::path generation_transcript;
  GenerationConfig generation;

  HttpChatConfig judge_endpoint;
  std::filesystem::path judge_transcript;
  JudgeConfig judge;

  std::string host = "127.0.0.1";
  int port = 8080;
  std::chrono::milliseconds request_timeout{30000};
  unsigned server_threads = 8;

  /// Throws ConfigError.
  void validate() const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Applies "table.key" entries onto cfg. Unknown keys are errors.
void apply_toml(EngineConfig& cfg, const std::map<std::string, TomlValue>& doc);

/// Applies REIBUN_<TABLE>_<KEY> variables, e.g. REIBUN_SELECTION_WINDOW.
void apply_env(EngineConfig& cfg, const EnvLookup& env = process_env);

/// Defaults, then the file (if given), then the environment.
EngineConfig load_config(const std::optional<std::filesystem::path>& path,
                         const EnvLookup& env = process_env);

/// Every recognised "table.key".
std::vector<std::string> config_keys();

}  // namespace reibun
