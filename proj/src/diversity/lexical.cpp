#include "reibun/diversity.hpp"

namespace reibun {

namespace {

constexpr char kJoin = '\x1f';

std::string ngram_key(std::span<const std::string> tokens, std::size_t start, std::size_t n) {
  std::string key = tokens[start];
  for (std::size_t k = 1; k < n; ++k) {
    key += kJoin;
    key += tokens[start + k];
  }
  return key;
}

}  // namespace

void NgramPool::add(std::span<const std::string> tokens) {
  for (std::size_t n = 1; n <= kMaxNgram; ++n) {
    if (tokens.size() < n) break;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      ++counts_[n - 1][ngram_key(tokens, i, n)];
      ++totals_[n - 1];
    }
  }
}

double NgramPool::diversity() const { return diversity_with({}); }

double NgramPool::diversity_with(std::span<const std::string> tokens) const {
  long double sum = 0.0L;
  std::size_t orders = 0;
  for (std::size_t n = 1; n <= kMaxNgram; ++n) {
    std::size_t total = totals_[n - 1];
    std::size_t distinct = counts_[n - 1].size();
    if (tokens.size() >= n) {
      std::unordered_set<std::string> fresh;
      for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = ngram_key(tokens, i, n);
        ++total;
        if (!counts_[n - 1].contains(key) && fresh.insert(key).second) ++distinct;
      }
    }
    if (total == 0) continue;
    sum += static_cast<long double>(static_cast<double>(distinct) / static_cast<double>(total));
    ++orders;
  }
  return orders == 0 ? 0.0 : static_cast<double>(sum / static_cast<long double>(orders));
}

std::vector<std::string> surface_tokens(const Sentence& s) {
  std::vector<std::string> out;
  out.reserve(s.tokens.size());
  for (const auto& t : s.tokens) out.push_back(t.surface);
  return out;
}

double lexical_diversity(std::span<const std::vector<std::string>> token_lists) {
  NgramPool pool;
  for (const auto& tokens : token_lists) pool.add(tokens);
  return pool.diversity();
}

double lexical_diversity(std::span<const Sentence> sentences) {
  NgramPool pool;
  for (const auto& s : sentences) pool.add(surface_tokens(s));
  return pool.diversity();
}

}  // namespace reibun
