#include <algorithm>
#include <cmath>

#include "reibun/diversity.hpp"

namespace reibun {

namespace {

// Node indices with every child before its parent.
std::vector<std::size_t> post_order(const LabeledTree& t) {
  std::vector<std::size_t> order;
  if (t.nodes.empty()) return order;
  order.reserve(t.nodes.size());
  std::vector<std::pair<std::size_t, std::size_t>> stack{{t.root, 0}};
  while (!stack.empty()) {
    auto& [node, next_child] = stack.back();
    const auto& children = t.nodes[node].children;
    if (next_child < children.size()) {
      std::size_t child = children[next_child++];
      stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

bool same_production(const LabeledTree& a, std::size_t na, const LabeledTree& b, std::size_t nb) {
  const auto& ca = a.nodes[na].children;
  const auto& cb = b.nodes[nb].children;
  if (ca.size() != cb.size()) return false;
  for (std::size_t j = 0; j < ca.size(); ++j) {
    if (a.nodes[ca[j]].label != b.nodes[cb[j]].label) return false;
  }
  return true;
}

}  // namespace

double subtree_kernel(const LabeledTree& a, const LabeledTree& b) {
  const std::size_t n = a.nodes.size();
  const std::size_t m = b.nodes.size();
  if (n == 0 || m == 0) return 0.0;
  const auto order_a = post_order(a);
  const auto order_b = post_order(b);

  std::vector<double> c(n * m, 0.0);
  double total = 0.0;
  for (std::size_t na : order_a) {
    for (std::size_t nb : order_b) {
      if (a.nodes[na].label != b.nodes[nb].label) continue;
      double value = 1.0;
      if (same_production(a, na, b, nb)) {
        const auto& ca = a.nodes[na].children;
        const auto& cb = b.nodes[nb].children;
        for (std::size_t j = 0; j < ca.size(); ++j) value *= 1.0 + c[ca[j] * m + cb[j]];
      }
      c[na * m + nb] = value;
      total += value;
    }
  }
  return total;
}

double syntactic_similarity(const LabeledTree& a, const LabeledTree& b, double kaa, double kbb) {
  if (kaa <= 0.0 || kbb <= 0.0) return 0.0;
  if (a == b) return 1.0;
  const double kab = subtree_kernel(a, b);
  double denom = std::sqrt(kaa * kbb);
  if (!std::isfinite(denom)) denom = std::sqrt(kaa) * std::sqrt(kbb);
  return std::clamp(kab / denom, 0.0, 1.0);
}

double syntactic_similarity(const LabeledTree& a, const LabeledTree& b) {
  return syntactic_similarity(a, b, subtree_kernel(a, a), subtree_kernel(b, b));
}

std::vector<double> similarity_matrix(std::span<const LabeledTree> trees) {
  const std::size_t n = trees.size();
  std::vector<double> self(n);
  for (std::size_t i = 0; i < n; ++i) self[i] = subtree_kernel(trees[i], trees[i]);
  std::vector<double> sim(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sim[i * n + i] = self[i] > 0.0 ? 1.0 : 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = syntactic_similarity(trees[i], trees[j], self[i], self[j]);
      sim[i * n + j] = s;
      sim[j * n + i] = s;
    }
  }
  return sim;
}

double syntactic_diversity(std::span<const LabeledTree> trees) {
  const std::size_t n = trees.size();
  if (n < 2) return 1.0;
  const auto sim = similarity_matrix(trees);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) sum += 1.0 - sim[i * n + j];
  }
  return sum / static_cast<double>(n * (n - 1) / 2);
}

double syntactic_diversity(std::span<const Sentence> sentences) {
  std::vector<LabeledTree> trees;
  trees.reserve(sentences.size());
  for (const auto& s : sentences) trees.push_back(generalize_labels(s));
  return syntactic_diversity(trees);
}

}  // namespace reibun
