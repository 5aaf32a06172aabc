#pragma once

#include "alphakit/common.hpp"

namespace alphakit {

/// Average ranks in 1..n, ties receive the mean of the ranks they span.
Vec average_ranks(const Vec& x);

/// Ranks mapped affinely to [0,1]: (rank - 1) / (n - 1). A single element maps to 0.5.
Vec rank01(const Vec& x);

struct CorrValue {
  double value = 0.0;
  bool degenerate = false;  // either side constant (or too short); value forced to 0
};

CorrValue pearson(const Vec& x, const Vec& y);

/// Exact Spearman: Pearson correlation of average-tie ranks.
/// Throws std::invalid_argument on length mismatch.
CorrValue spearman(const Vec& x, const Vec& y);

/// Convenience wrapper; degenerate inputs yield 0.
double spearman_exact(const Vec& x, const Vec& y);

}  // namespace alphakit
