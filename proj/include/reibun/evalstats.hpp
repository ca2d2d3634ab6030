#pragma once

#include <istream>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reibun/sentence.hpp"

namespace reibun {

// ------------------------------------------------------------ F distribution

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double incomplete_beta(double a, double b, double x);

double f_cdf(double x, double df1, double df2);
/// Upper tail 1 - cdf, computed without cancellation.
double f_sf(double x, double df1, double df2);
/// Inverse of f_cdf for p in (0, 1).
double f_quantile(double p, double df1, double df2);

// ------------------------------------------------------------------- ratings

/// n targets x k raters with optional cells.
class RatingMatrix {
 public:
  RatingMatrix() = default;
  RatingMatrix(std::vector<std::string> target_ids, std::vector<std::string> rater_ids);
  /// Complete matrix from rows; ids are "0", "1", ...
  static RatingMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t targets() const { return target_ids_.size(); }
  std::size_t raters() const { return rater_ids_.size(); }
  const std::vector<std::string>& target_ids() const { return target_ids_; }
  const std::vector<std::string>& rater_ids() const { return rater_ids_; }

  std::optional<double>& at(std::size_t target, std::size_t rater) { return cells_[target * raters() + rater]; }
  const std::optional<double>& at(std::size_t target, std::size_t rater) const {
    return cells_[target * raters() + rater];
  }

  /// Rows with every cell present (listwise deletion).
  RatingMatrix complete_rows() const;
  /// Sub-matrix of the given rater columns.
  RatingMatrix columns(std::span<const std::size_t> raters) const;

 private:
  std::vector<std::string> target_ids_;
  std::vector<std::string> rater_ids_;
  std::vector<std::optional<double>> cells_;
};

struct IccResult {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double f_value = 0.0;
  double p_value = 1.0;
  std::size_t df1 = 0;
  std::size_t df2 = 0;
  std::size_t n_targets = 0;
  std::size_t n_raters = 0;

  bool significant(double alpha = 0.05) const { return p_value < alpha; }
};

/// Zero total variance, or an undefined ratio.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Consistency ICC for a two-way mixed model with single ratings, after
/// listwise deletion. `confidence` sets the two-sided interval.
/// Throws DegenerateError, or std::invalid_argument when fewer than two
/// complete targets or raters remain.
IccResult icc31(const RatingMatrix& m, double confidence = 0.95);

/// Ordinal tags mapped to 1, 2, ... in scale order. Throws
/// std::invalid_argument on a label outside the scale.
std::vector<double> labels_to_numeric(std::span<const std::string> labels,
                                      std::span<const std::string> scale);

const std::vector<std::string>& level_scale();      // N5 .. N1
const std::vector<std::string>& diversity_scale();  // Low, Medium, High
const std::vector<std::string>& sense_scale();      // not_similar, similar
const std::vector<std::string>& reject_scale();     // false, true

/// Scale for a rating item name (level, sense, reject, diversity), or
/// nullopt for numeric items.
const std::vector<std::string>* scale_for_item(std::string_view item);

struct PairwiseAgreement {
  std::vector<std::string> rater_ids;
  /// k x k, row-major; nullopt where fewer than two shared targets remain
  /// or the pair is degenerate.
  std::vector<std::optional<IccResult>> cells;

  const std::optional<IccResult>& at(std::size_t i, std::size_t j) const {
    return cells[i * rater_ids.size() + j];
  }
};

/// icc31 on each pair of rater columns over their shared targets.
PairwiseAgreement pairwise_agreement(const RatingMatrix& m, double confidence = 0.95);

struct RatingRecord {
  std::string target_id;
  std::string rater_id;
  std::string item;
  std::string value;
};

class RatingsFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CSV with header target_id,rater_id,item,value (column order free).
std::vector<RatingRecord> read_ratings_csv(std::istream& in);

/// Keeps raters who rated at least `min_share` of the distinct targets of
/// `item`.
std::vector<RatingRecord> filter_raters(std::span<const RatingRecord> records, std::string_view item,
                                        double min_share = 0.5);

/// Matrix of `item` values, mapped through scale_for_item when the item has
/// one. Targets and raters appear in first-seen order. Throws
/// RatingsFormatError on unknown labels or repeated (target, rater) cells.
RatingMatrix rating_matrix(std::span<const RatingRecord> records, std::string_view item);

struct RankingRecord {
  std::string block_id;
  std::string rater_id;
  Level target_level = Level::N3;
  std::vector<std::string> ranking;
};

/// counts[level][rater][system] = number of blocks where the rater ranked
/// the system first.
using RankFirstCounts = std::map<Level, std::map<std::string, std::map<std::string, std::size_t>>>;

/// Throws std::invalid_argument when a ranking is not a permutation of the
/// systems named in the first record.
RankFirstCounts rank_first_counts(std::span<const RankingRecord> rankings);

}  // namespace reibun
