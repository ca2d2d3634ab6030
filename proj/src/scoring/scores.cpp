#include <algorithm>
#include <cmath>

#include "reibun/scoring.hpp"

namespace reibun {

double difficulty_score(Level target, Level sentence, const DifficultyConfig& cfg) {
  const int delta = rank(sentence) - rank(target);
  if (delta <= 0) return std::max(0.0, 1.0 - cfg.penalty_easier * static_cast<double>(-delta));
  return std::max(0.0, 1.0 - cfg.penalty_harder * static_cast<double>(delta));
}

double difficulty_score(Level target, std::optional<Level> sentence, const DifficultyConfig& cfg) {
  return sentence ? difficulty_score(target, *sentence, cfg) : 0.0;
}

double sense_similarity(const TargetEmbedding& context, const TargetEmbedding& candidate) {
  const auto& a = context.vector;
  const auto& b = candidate.vector;
  if (a.size() != b.size()) {
    throw EmbeddingError("embedding dimension mismatch: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw EmbeddingError("zero-norm embedding");
  const double cosine = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(cosine, 0.0, 1.0);
}

}  // namespace reibun
