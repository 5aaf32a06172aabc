#pragma once

#include "alphakit/common.hpp"
#include "alphakit/panel.hpp"

#include <string_view>
#include <vector>

namespace alphakit {

enum class DistanceMetric : int {
  euclidean = 0,
  cross_entropy,  // symmetrized KL by default; see raw_cross_entropy flags below
  one_minus_cos,
  one_minus_corr,
};

std::string_view distance_metric_name(DistanceMetric metric);
/// Throws ConfigError on an unknown name.
DistanceMetric parse_distance_metric(const std::string& name);

inline constexpr double kDistLogFloor = 1e-12;  // floor inside logs; softmax can underflow

/// Softmax over one feature's valid cross-section on `day`. Entries are >= 0
/// and sum to 1; adding a constant to the raw feature leaves the result
/// unchanged. Throws std::invalid_argument when fewer than 2 assets are valid.
Vec daily_softmax(const FeaturePanel& feature, int day);

/// Per-day probability vectors for a feature set, all over the same assets
/// (the intersection of the features' valid sets that day).
struct DayDistributions {
  int day = 0;
  std::vector<int> assets;  // panel asset indices the distributions cover
  Mat probs;                // m features x n assets, rows sum to 1
};

DayDistributions day_distributions(const std::vector<FeaturePanel>& features, int day);

/// Distance between two probability vectors of equal length.
/// cross_entropy defaults to symmetrized KL, 0.5*(KL(p||q) + KL(q||p));
/// with raw_cross_entropy it is 0.5*(H(p,q) + H(q,p)), whose self-value is
/// the entropy H(p) rather than 0.
double distribution_distance(const Vec& p, const Vec& q, DistanceMetric metric,
                             bool raw_cross_entropy = false);

/// All pairwise distances between the rows of `probs`.
Mat pairwise_distance(const Mat& probs, DistanceMetric metric, bool raw_cross_entropy = false);

/// Per-day pairwise matrices averaged over `days`.
Mat averaged_distance_matrix(const std::vector<FeaturePanel>& features,
                             const std::vector<int>& days, DistanceMetric metric,
                             bool raw_cross_entropy = false);

struct KmeansResult {
  Mat centers;                  // k x dim
  std::vector<int> assignment;  // per point, cluster index in [0, k)
  std::vector<double> sse_trace;  // within-cluster SSE after each assignment pass
  int iterations = 0;
};

/// Lloyd iterations with k-means++ seeding under squared Euclidean distance.
/// Stops when assignments stabilize or after 100 iterations; deterministic for
/// a given rng state. Throws std::invalid_argument unless 1 <= k <= n_points.
KmeansResult kmeans_centers(const Mat& points, int k, Rng& rng);

/// Default cluster count: max(2, round(0.10 * m)), capped at m.
int default_cluster_count(int m);

struct DiversityReport {
  DistanceMetric metric = DistanceMetric::cross_entropy;
  bool raw_cross_entropy = false;
  int k = 0;
  std::vector<int> days;
  std::vector<double> day_score;
  double mean = 0.0;
  double stdev = 0.0;  // population
};

/// Per day: softmax the feature set, cluster the distributions into k groups,
/// and report the mean pairwise distance among the cluster centers (0 when
/// k == 1). Aggregates mean and population std over the given days. Clustering
/// always runs under Euclidean distance; `metric` applies to center-to-center
/// distances only. Deterministic: each day's clustering seeds from
/// (seed, day).
DiversityReport diversity_score(const std::vector<FeaturePanel>& features,
                                const std::vector<int>& days, DistanceMetric metric, int k,
                                std::uint64_t seed, bool raw_cross_entropy = false);

}  // namespace alphakit
