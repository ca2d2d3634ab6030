#include "reibun/diversity.hpp"

namespace reibun {

DiversityScore combined_diversity(std::span<const Sentence> sentences) {
  return make_diversity(syntactic_diversity(sentences), lexical_diversity(sentences));
}

}  // namespace reibun
