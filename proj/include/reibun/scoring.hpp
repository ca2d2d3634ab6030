#pragma once

#include <optional>
#include <stdexcept>

#include "reibun/embedding.hpp"
#include "reibun/sentence.hpp"

namespace reibun {

struct DifficultyConfig {
  /// Per-level penalty for sentences easier than the target.
  double penalty_easier = 0.2;
  /// Per-level penalty for sentences harder than the target.
  double penalty_harder = 0.4;
};

/// 1 at the target level, decreasing linearly with level distance and
/// clamped at 0. Harder sentences are penalised with `penalty_harder`.
double difficulty_score(Level target, Level sentence, const DifficultyConfig& cfg = {});

/// Unlabelled sentences score 0.
double difficulty_score(Level target, std::optional<Level> sentence, const DifficultyConfig& cfg = {});

/// Cosine similarity clamped at 0. Throws EmbeddingError on dimension
/// mismatch or a zero vector.
double sense_similarity(const TargetEmbedding& context, const TargetEmbedding& candidate);

/// Equal-weight mean of the two quality scores.
constexpr double combined_quality(double difficulty, double sense) {
  return 0.5 * difficulty + 0.5 * sense;
}

}  // namespace reibun
