#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "reibun/sentence.hpp"

namespace reibun {

/// Half-open token range [begin, end).
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  auto operator<=>(const TokenSpan&) const = default;
};

struct TargetEmbedding {
  std::vector<double> vector;
  SentenceId sentence_id = 0;
  TokenSpan span;
};

enum class ProviderMode { PrecomputedFile, RemoteService, DeterministicStub };

std::string_view to_string(ProviderMode mode);

class EmbeddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingEmbedding : public EmbeddingError {
 public:
  using EmbeddingError::EmbeddingError;
};

class ServiceUnreachable : public EmbeddingError {
 public:
  using EmbeddingError::EmbeddingError;
};

class ServiceTimeout : public EmbeddingError {
 public:
  using EmbeddingError::EmbeddingError;
};

/// Source of contextual target-word vectors. The same (sentence, span)
/// must map to the same vector for the lifetime of the provider, and
/// implementations must be safe to call from several threads.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual ProviderMode mode() const = 0;
  /// Throws EmbeddingError (or a subclass).
  virtual TargetEmbedding embed(const Sentence& sentence, TokenSpan span) = 0;
};

/// Checks a span against a sentence and a returned vector against the
/// declared dimension; throws EmbeddingError.
void check_span(const Sentence& sentence, TokenSpan span);
void check_vector(const std::vector<double>& v, std::size_t dimension);

/// Vectors read from JSON lines {sentence_id, span_start, span_end, vector}.
class PrecomputedEmbeddings final : public EmbeddingProvider {
 public:
  static std::unique_ptr<PrecomputedEmbeddings> load(const std::filesystem::path& path);
  static std::unique_ptr<PrecomputedEmbeddings> parse(std::istream& in);

  std::size_t dimension() const override { return dimension_; }
  ProviderMode mode() const override { return ProviderMode::PrecomputedFile; }
  TargetEmbedding embed(const Sentence& sentence, TokenSpan span) override;
  std::size_t size() const { return vectors_.size(); }

 private:
  std::size_t dimension_ = 0;
  std::map<std::pair<SentenceId, TokenSpan>, std::vector<double>> vectors_;
};

/// Seeded hash of the span surface and the sentence surface expanded to a
/// unit vector. The span component dominates, so the same word in two
/// sentences gets positively correlated vectors.
class StubEmbeddings final : public EmbeddingProvider {
 public:
  explicit StubEmbeddings(std::size_t dimension = 64, std::uint64_t seed = 0x5eed);

  std::size_t dimension() const override { return dimension_; }
  ProviderMode mode() const override { return ProviderMode::DeterministicStub; }
  TargetEmbedding embed(const Sentence& sentence, TokenSpan span) override;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

struct RemoteEmbeddingConfig {
  std::string base_url = "http://127.0.0.1:8765";
  std::chrono::milliseconds timeout{5000};
  std::size_t max_in_flight = 8;
  /// When 0 the dimension is read from the service's /health endpoint.
  std::size_t dimension = 0;
};

/// Client for the annotator sidecar's POST /embed. The request carries the
/// sentence text and the target span as code-point offsets.
class RemoteEmbeddings final : public EmbeddingProvider {
 public:
  /// Contacts /health to learn the dimension unless one is configured.
  /// Throws ServiceUnreachable / ServiceTimeout.
  explicit RemoteEmbeddings(RemoteEmbeddingConfig cfg);

  std::size_t dimension() const override { return dimension_; }
  ProviderMode mode() const override { return ProviderMode::RemoteService; }
  TargetEmbedding embed(const Sentence& sentence, TokenSpan span) override;

 private:
  RemoteEmbeddingConfig cfg_;
  std::size_t dimension_ = 0;
  std::counting_semaphore<1024> in_flight_;
};

/// Code-point offsets [begin, end) of a token span inside the sentence surface.
std::pair<std::size_t, std::size_t> codepoint_offsets(const Sentence& sentence, TokenSpan span);

/// Dispatches on the provider's mode (the provider already encapsulates it).
TargetEmbedding embed_target(EmbeddingProvider& provider, const Sentence& sentence, TokenSpan span);

}  // namespace reibun
