#include <cmath>
#include <fstream>

#include <json.hpp>

#include "reibun/embedding.hpp"
#include "reibun/unicode.hpp"

namespace reibun {

namespace {

std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// uniform entries in [-1, 1)
void add_hashed(std::vector<double>& v, std::string_view text, std::uint64_t seed, double weight) {
  std::uint64_t state = fnv1a(text, seed);
  for (double& x : v) {
    const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    x += weight * (2.0 * u - 1.0);
  }
}

}  // namespace

std::string_view to_string(ProviderMode mode) {
  switch (mode) {
    case ProviderMode::PrecomputedFile: return "precomputed-file";
    case ProviderMode::RemoteService: return "remote-service";
    case ProviderMode::DeterministicStub: return "deterministic-stub";
  }
  return "?";
}

void check_span(const Sentence& sentence, TokenSpan span) {
  if (span.begin >= span.end || span.end > sentence.tokens.size()) {
    throw EmbeddingError("token span [" + std::to_string(span.begin) + ", " +
                         std::to_string(span.end) + ") invalid for sentence " +
                         std::to_string(sentence.id));
  }
}

void check_vector(const std::vector<double>& v, std::size_t dimension) {
  if (v.size() != dimension) {
    throw EmbeddingError("embedding has dimension " + std::to_string(v.size()) + ", expected " +
                         std::to_string(dimension));
  }
  bool nonzero = false;
  for (double x : v) {
    if (!std::isfinite(x)) throw EmbeddingError("embedding has non-finite entries");
    nonzero = nonzero || x != 0.0;
  }
  if (!nonzero) throw EmbeddingError("embedding is all zero");
}

std::pair<std::size_t, std::size_t> codepoint_offsets(const Sentence& sentence, TokenSpan span) {
  std::size_t begin = 0, end = 0, offset = 0;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (i == span.begin) begin = offset;
    offset += unicode::codepoint_count(sentence.tokens[i].surface);
    if (i + 1 == span.end) end = offset;
  }
  return {begin, end};
}

TargetEmbedding embed_target(EmbeddingProvider& provider, const Sentence& sentence, TokenSpan span) {
  check_span(sentence, span);
  TargetEmbedding out = provider.embed(sentence, span);
  check_vector(out.vector, provider.dimension());
  return out;
}

// --- precomputed ------------------------------------------------------------

std::unique_ptr<PrecomputedEmbeddings> PrecomputedEmbeddings::parse(std::istream& in) {
  auto out = std::make_unique<PrecomputedEmbeddings>();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      TokenSpan span{j.at("span_start").get<std::size_t>(), j.at("span_end").get<std::size_t>()};
      auto id = j.at("sentence_id").get<SentenceId>();
      auto vec = j.at("vector").get<std::vector<double>>();
      if (out->dimension_ == 0) out->dimension_ = vec.size();
      check_vector(vec, out->dimension_);
      out->vectors_[{id, span}] = std::move(vec);
    } catch (const nlohmann::json::exception& e) {
      throw EmbeddingError("embedding file line " + std::to_string(lineno) + ": " + e.what());
    } catch (const EmbeddingError& e) {
      throw EmbeddingError("embedding file line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::unique_ptr<PrecomputedEmbeddings> PrecomputedEmbeddings::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EmbeddingError("cannot open embedding file " + path.string());
  return parse(in);
}

TargetEmbedding PrecomputedEmbeddings::embed(const Sentence& sentence, TokenSpan span) {
  auto it = vectors_.find({sentence.id, span});
  if (it == vectors_.end()) {
    throw MissingEmbedding("no precomputed embedding for sentence " + std::to_string(sentence.id) +
                           " span [" + std::to_string(span.begin) + ", " +
                           std::to_string(span.end) + ")");
  }
  return {it->second, sentence.id, span};
}

// --- stub -------------------------------------------------------------------

StubEmbeddings::StubEmbeddings(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension_ == 0) throw EmbeddingError("stub dimension must be positive");
}

TargetEmbedding StubEmbeddings::embed(const Sentence& sentence, TokenSpan span) {
  check_span(sentence, span);
  std::string target;
  for (std::size_t i = span.begin; i < span.end; ++i) target += sentence.tokens[i].surface;

  std::vector<double> v(dimension_, 0.0);
  add_hashed(v, target, seed_, 1.0);
  add_hashed(v, sentence.surface(), seed_ ^ 0xa5a5a5a5a5a5a5a5ULL, 0.5);
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    v[0] = 1.0;
    norm = 1.0;
  }
  for (double& x : v) x /= norm;
  return {std::move(v), sentence.id, span};
}

}  // namespace reibun
