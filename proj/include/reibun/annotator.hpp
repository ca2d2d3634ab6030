#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reibun/sentence.hpp"

namespace reibun {

class AnnotatorError : public std::runtime_error {
 public:
  enum class Kind { Unreachable, Timeout, Rejected, BadResponse };
  AnnotatorError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct AnnotatorHealth {
  std::string status;
  std::string mode;
  std::size_t dimension = 0;
};

struct LevelDistribution {
  Level level = Level::N3;
  /// Indexed by rank - 1, i.e. N5 first.
  std::array<double, 5> probabilities{};
};

/// Client for the annotator sidecar. Each call opens its own connection, so
/// one client may be shared across threads.
class AnnotatorClient {
 public:
  explicit AnnotatorClient(std::string base_url,
                           std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));

  /// GET /health.
  AnnotatorHealth health() const;

  /// POST /parse {text}. The reply is CoNLL-U, either as the body or in a
  /// JSON field "conllu"; it must parse cleanly.
  std::vector<Sentence> parse(std::string_view text) const;

  /// POST /embed {text, span: [begin, end)} with code-point offsets.
  std::vector<double> embed(std::string_view text, std::size_t cp_begin, std::size_t cp_end) const;

  /// POST /classify {text}. Probabilities must sum to 1 within 1e-6.
  LevelDistribution classify(std::string_view text) const;

  const std::string& base_url() const { return base_url_; }

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

}  // namespace reibun
