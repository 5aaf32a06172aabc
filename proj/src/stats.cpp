#include "alphakit/stats.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace alphakit {

Vec average_ranks(const Vec& x) {
  const Eigen::Index n = x.size();
  Vec ranks(n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&x](Eigen::Index a, Eigen::Index b) { return x[a] < x[b]; });
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i + 1;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (Eigen::Index k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

Vec rank01(const Vec& x) {
  const Eigen::Index n = x.size();
  if (n == 1) return Vec::Constant(1, 0.5);
  Vec r = average_ranks(x);
  return (r.array() - 1.0) / static_cast<double>(n - 1);
}

CorrValue pearson(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  const Eigen::Index n = x.size();
  if (n < 2) return {0.0, true};
  const double mx = x.mean();
  const double my = y.mean();
  const Arr cx = x.array() - mx;
  const Arr cy = y.array() - my;
  const double sxx = (cx * cx).sum();
  const double syy = (cy * cy).sum();
  const double sxy = (cx * cy).sum();
  if (sxx <= 0.0 || syy <= 0.0) return {0.0, true};
  return {sxy / std::sqrt(sxx * syy), false};
}

CorrValue spearman(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  if (x.size() < 2) return {0.0, true};
  return pearson(average_ranks(x), average_ranks(y));
}

double spearman_exact(const Vec& x, const Vec& y) { return spearman(x, y).value; }

}  // namespace alphakit
