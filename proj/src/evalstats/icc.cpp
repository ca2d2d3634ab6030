#include <algorithm>
#include <cfloat>
#include <cmath>

#include "reibun/evalstats.hpp"

namespace reibun {

RatingMatrix::RatingMatrix(std::vector<std::string> target_ids, std::vector<std::string> rater_ids)
    : target_ids_(std::move(target_ids)),
      rater_ids_(std::move(rater_ids)),
      cells_(target_ids_.size() * rater_ids_.size()) {}

RatingMatrix RatingMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t k = rows.empty() ? 0 : rows.front().size();
  std::vector<std::string> targets, raters;
  for (std::size_t i = 0; i < rows.size(); ++i) targets.push_back(std::to_string(i));
  for (std::size_t j = 0; j < k; ++j) raters.push_back(std::to_string(j));
  RatingMatrix m(std::move(targets), std::move(raters));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != k) throw std::invalid_argument("ragged rating rows");
    for (std::size_t j = 0; j < k; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

RatingMatrix RatingMatrix::complete_rows() const {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < targets(); ++i) {
    bool full = true;
    for (std::size_t j = 0; j < raters() && full; ++j) full = at(i, j).has_value();
    if (full) keep.push_back(i);
  }
  std::vector<std::string> ids;
  for (std::size_t i : keep) ids.push_back(target_ids_[i]);
  RatingMatrix out(std::move(ids), rater_ids_);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    for (std::size_t j = 0; j < raters(); ++j) out.at(r, j) = at(keep[r], j);
  }
  return out;
}

RatingMatrix RatingMatrix::columns(std::span<const std::size_t> cols) const {
  std::vector<std::string> ids;
  for (std::size_t j : cols) ids.push_back(rater_ids_.at(j));
  RatingMatrix out(target_ids_, std::move(ids));
  for (std::size_t i = 0; i < targets(); ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) out.at(i, c) = at(i, cols[c]);
  }
  return out;
}

IccResult icc31(const RatingMatrix& input, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence outside (0, 1)");
  const RatingMatrix m = input.complete_rows();
  const std::size_t n = m.targets();
  const std::size_t k = m.raters();
  if (n < 2 || k < 2) throw std::invalid_argument("ICC needs at least 2 complete targets and 2 raters");

  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
  double grand = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double x = *m.at(i, j);
      row_mean[i] += x;
      col_mean[j] += x;
      grand += x;
      sum_sq += x * x;
    }
  }
  for (double& r : row_mean) r /= kd;
  for (double& c : col_mean) c /= nd;
  grand /= nd * kd;

  double ss_rows = 0.0, ss_total = 0.0, ss_error = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss_rows += (row_mean[i] - grand) * (row_mean[i] - grand);
  ss_rows *= kd;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double x = *m.at(i, j);
      ss_total += (x - grand) * (x - grand);
      const double resid = x - row_mean[i] - col_mean[j] + grand;
      ss_error += resid * resid;
    }
  }

  const double noise_floor = (32.0 * DBL_EPSILON) * (32.0 * DBL_EPSILON) * sum_sq;
  if (ss_total <= noise_floor) throw DegenerateError("ratings have zero variance");
  if (ss_error <= noise_floor) ss_error = 0.0;

  IccResult out;
  out.n_targets = n;
  out.n_raters = k;
  out.df1 = n - 1;
  out.df2 = (n - 1) * (k - 1);
  const double bms = ss_rows / static_cast<double>(out.df1);
  const double ems = ss_error / static_cast<double>(out.df2);
  const double denom = bms + (kd - 1.0) * ems;
  if (!(denom > 0.0)) throw DegenerateError("ICC undefined: between-target and residual variance are both zero");
  out.estimate = (bms - ems) / denom;

  if (ems == 0.0) {
    out.f_value = std::numeric_limits<double>::infinity();
    out.ci_low = out.ci_high = 1.0;
    out.p_value = 0.0;
    return out;
  }
  const double df1 = static_cast<double>(out.df1);
  const double df2 = static_cast<double>(out.df2);
  const double f = bms / ems;
  const double q = 1.0 - (1.0 - confidence) / 2.0;
  const double f_low = f / f_quantile(q, df1, df2);
  const double f_high = f * f_quantile(q, df2, df1);
  out.f_value = f;
  out.ci_low = (f_low - 1.0) / (f_low + kd - 1.0);
  out.ci_high = (f_high - 1.0) / (f_high + kd - 1.0);
  out.p_value = f_sf(f, df1, df2);
  return out;
}

PairwiseAgreement pairwise_agreement(const RatingMatrix& m, double confidence) {
  const std::size_t k = m.raters();
  PairwiseAgreement out;
  out.rater_ids = m.rater_ids();
  out.cells.resize(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    IccResult self;
    self.estimate = self.ci_low = self.ci_high = 1.0;
    self.p_value = 0.0;
    self.n_raters = 1;
    for (std::size_t t = 0; t < m.targets(); ++t) self.n_targets += m.at(t, i).has_value();
    out.cells[i * k + i] = self;
    for (std::size_t j = i + 1; j < k; ++j) {
      const std::size_t cols[] = {i, j};
      try {
        const IccResult r = icc31(m.columns(cols), confidence);
        out.cells[i * k + j] = r;
        out.cells[j * k + i] = r;
      } catch (const DegenerateError&) {
      } catch (const std::invalid_argument&) {
      }
    }
  }
  return out;
}

}  // namespace reibun
