#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "reibun/sentence.hpp"

namespace reibun {

// ---------------------------------------------------------------------------
// Label generalisation
// ---------------------------------------------------------------------------

enum class LabelGranularity {
  Relation,  // subtypes collapsed, e.g. acl:relcl -> acl
  Class,     // core / noncore / function / ... groups
};

/// Maps dependency relations to generalised tree labels. The built-in table
/// is resources/deprel_map.tsv.
class LabelMap {
 public:
  static const LabelMap& builtin();
  /// TSV with columns deprel, label, class; '#' lines are comments.
  static LabelMap parse(std::istream& in);
  static LabelMap load(const std::filesystem::path& path);

  /// Exact entry first, then the base relation before ':'; unknown
  /// relations map to their base relation at either granularity.
  std::string generalize(std::string_view deprel, LabelGranularity g = LabelGranularity::Relation) const;

  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::string label;
    std::string cls;
  };
  std::unordered_map<std::string, Entry> entries_;
};

/// Ordered labelled tree. Children lists are in token order.
struct LabeledTree {
  struct Node {
    std::string label;
    std::vector<std::size_t> children;
    bool operator==(const Node&) const = default;
  };
  std::vector<Node> nodes;
  std::size_t root = 0;

  bool operator==(const LabeledTree&) const = default;
};

LabeledTree generalize_labels(const Sentence& s, const LabelMap& map = LabelMap::builtin(),
                              LabelGranularity g = LabelGranularity::Relation);

// ---------------------------------------------------------------------------
// Tree kernel
// ---------------------------------------------------------------------------

/// Number of shared tree fragments. Integer-valued; exact while below 2^53,
/// which covers trees far larger than the 50-token sentence limit in
/// practice.
///
/// Sum over node pairs of C(n1, n2), where C is 0 for different labels,
/// the product of (1 + C) over aligned children when both nodes have the
/// same number of children with pairwise equal labels, and 1 otherwise.
double subtree_kernel(const LabeledTree& a, const LabeledTree& b);

/// K(a,b) / sqrt(K(a,a) K(b,b)), in [0, 1]; exactly 1 for equal trees.
double syntactic_similarity(const LabeledTree& a, const LabeledTree& b);
/// Same, with precomputed self kernels.
double syntactic_similarity(const LabeledTree& a, const LabeledTree& b, double kaa, double kbb);

/// Mean over unordered pairs of 1 - similarity; 1.0 for fewer than two trees.
double syntactic_diversity(std::span<const LabeledTree> trees);
double syntactic_diversity(std::span<const Sentence> sentences);

// ---------------------------------------------------------------------------
// Lexical diversity
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMaxNgram = 4;

/// Pooled 1..4-gram counts over a growing list of token sequences.
class NgramPool {
 public:
  void add(std::span<const std::string> tokens);
  /// Diversity of the pool as it stands.
  double diversity() const;
  /// Diversity the pool would have after adding `tokens`, without adding.
  double diversity_with(std::span<const std::string> tokens) const;

  /// Distinct and total n-grams of order n (1-based) in the pool.
  std::size_t distinct(std::size_t n) const { return counts_.at(n - 1).size(); }
  std::size_t total(std::size_t n) const { return totals_.at(n - 1); }

 private:
  std::array<std::unordered_map<std::string, std::size_t>, kMaxNgram> counts_;
  std::array<std::size_t, kMaxNgram> totals_{};
};

/// Surface tokens of a sentence.
std::vector<std::string> surface_tokens(const Sentence& s);

/// Mean over n = 1..4 of distinct/total pooled n-grams; orders with no
/// n-grams at all are skipped. 0 for an empty list.
double lexical_diversity(std::span<const std::vector<std::string>> token_lists);
double lexical_diversity(std::span<const Sentence> sentences);

// ---------------------------------------------------------------------------

struct DiversityScore {
  double syntactic = 0.0;
  double lexical = 0.0;
  double combined = 0.0;
};

inline DiversityScore make_diversity(double syntactic, double lexical) {
  return {syntactic, lexical, 0.5 * syntactic + 0.5 * lexical};
}

DiversityScore combined_diversity(std::span<const Sentence> sentences);

/// Pairwise syntactic similarity matrix, row-major n x n.
std::vector<double> similarity_matrix(std::span<const LabeledTree> trees);

}  // namespace reibun
