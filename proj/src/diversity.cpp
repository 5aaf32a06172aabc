#include "alphakit/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace alphakit {

namespace {

Vec softmax(const Vec& raw) {
  const double peak = raw.maxCoeff();
  Vec e = (raw.array() - peak).exp().matrix();
  return e / e.sum();
}

double sym_kl(const Vec& p, const Vec& q) {
  double acc = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    const double lp = std::log(std::max(p[i], kDistLogFloor));
    const double lq = std::log(std::max(q[i], kDistLogFloor));
    acc += (p[i] - q[i]) * (lp - lq);
  }
  return 0.5 * acc;
}

double raw_cross_entropy_sym(const Vec& p, const Vec& q) {
  double hpq = 0.0;
  double hqp = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    hpq -= p[i] * std::log(std::max(q[i], kDistLogFloor));
    hqp -= q[i] * std::log(std::max(p[i], kDistLogFloor));
  }
  return 0.5 * (hpq + hqp);
}

double one_minus_corr_dist(const Vec& p, const Vec& q) {
  const Vec pc = p.array() - p.mean();
  const Vec qc = q.array() - q.mean();
  const double sp = pc.squaredNorm();
  const double sq = qc.squaredNorm();
  constexpr double kVarFloor = 1e-30;
  if (sp <= kVarFloor && sq <= kVarFloor) return 0.0;  // both uniform, hence equal
  if (sp <= kVarFloor || sq <= kVarFloor) return 1.0;  // correlation undefined, treated as 0
  return 1.0 - pc.dot(qc) / std::sqrt(sp * sq);
}

double sq_dist(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  return (a - b).squaredNorm();
}

}  // namespace

std::string_view distance_metric_name(DistanceMetric metric) {
  switch (metric) {
    case DistanceMetric::euclidean: return "euclidean";
    case DistanceMetric::cross_entropy: return "cross_entropy";
    case DistanceMetric::one_minus_cos: return "one_minus_cos";
    case DistanceMetric::one_minus_corr: return "one_minus_corr";
  }
  throw std::logic_error("unhandled metric");
}

DistanceMetric parse_distance_metric(const std::string& name) {
  for (int i = 0; i < 4; ++i) {
    const auto metric = static_cast<DistanceMetric>(i);
    if (name == distance_metric_name(metric)) return metric;
  }
  throw ConfigError("unknown distance metric '" + name +
                    "' (expected euclidean, cross_entropy, one_minus_cos, one_minus_corr)");
}

Vec daily_softmax(const FeaturePanel& feature, int day) {
  if (day < 0 || day >= feature.values.cols()) {
    throw std::invalid_argument("day " + std::to_string(day) + " outside feature grid");
  }
  std::vector<int> assets;
  for (int a = 0; a < feature.values.rows(); ++a) {
    if (feature.valid(a, day)) assets.push_back(a);
  }
  if (assets.size() < 2) {
    throw std::invalid_argument("day " + std::to_string(day) + " has " +
                                std::to_string(assets.size()) +
                                " valid assets; softmax needs at least 2");
  }
  Vec raw(static_cast<Eigen::Index>(assets.size()));
  for (std::size_t i = 0; i < assets.size(); ++i) {
    raw[static_cast<Eigen::Index>(i)] = feature.values(assets[i], day);
  }
  return softmax(raw);
}

DayDistributions day_distributions(const std::vector<FeaturePanel>& features, int day) {
  if (features.empty()) throw std::invalid_argument("no features to softmax");
  const auto rows = features.front().values.rows();
  if (day < 0 || day >= features.front().values.cols()) {
    throw std::invalid_argument("day " + std::to_string(day) + " outside feature grid");
  }

  DayDistributions out;
  out.day = day;
  for (int a = 0; a < rows; ++a) {
    bool all_valid = true;
    for (const FeaturePanel& f : features) {
      if (f.values.rows() != rows || !f.valid(a, day)) {
        all_valid = false;
        break;
      }
    }
    if (all_valid) out.assets.push_back(a);
  }
  if (out.assets.size() < 2) {
    throw std::invalid_argument("day " + std::to_string(day) + " has " +
                                std::to_string(out.assets.size()) +
                                " assets valid across all features; softmax needs at least 2");
  }

  const auto n = static_cast<Eigen::Index>(out.assets.size());
  out.probs.resize(static_cast<Eigen::Index>(features.size()), n);
  Vec raw(n);
  for (std::size_t f = 0; f < features.size(); ++f) {
    for (Eigen::Index i = 0; i < n; ++i) {
      raw[i] = features[f].values(out.assets[static_cast<std::size_t>(i)], day);
    }
    out.probs.row(static_cast<Eigen::Index>(f)) = softmax(raw).transpose();
  }
  return out;
}

double distribution_distance(const Vec& p, const Vec& q, DistanceMetric metric,
                             bool raw_cross_entropy) {
  if (p.size() != q.size()) throw std::invalid_argument("distribution length mismatch");
  switch (metric) {
    case DistanceMetric::euclidean:
      return (p - q).norm();
    case DistanceMetric::cross_entropy:
      return raw_cross_entropy ? raw_cross_entropy_sym(p, q) : sym_kl(p, q);
    case DistanceMetric::one_minus_cos:
      return 1.0 - p.dot(q) / (p.norm() * q.norm());
    case DistanceMetric::one_minus_corr:
      return one_minus_corr_dist(p, q);
  }
  throw std::logic_error("unhandled metric");
}

Mat pairwise_distance(const Mat& probs, DistanceMetric metric, bool raw_cross_entropy) {
  const Eigen::Index m = probs.rows();
  Mat out = Mat::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vec pi = probs.row(i).transpose();
    if (raw_cross_entropy && metric == DistanceMetric::cross_entropy) {
      out(i, i) = distribution_distance(pi, pi, metric, true);  // self-value is H(p)
    }
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const Vec pj = probs.row(j).transpose();
      const double d = distribution_distance(pi, pj, metric, raw_cross_entropy);
      out(i, j) = d;
      out(j, i) = d;
    }
  }
  return out;
}

Mat averaged_distance_matrix(const std::vector<FeaturePanel>& features,
                             const std::vector<int>& days, DistanceMetric metric,
                             bool raw_cross_entropy) {
  if (days.empty()) throw std::invalid_argument("no days to average over");
  const auto m = static_cast<Eigen::Index>(features.size());
  Mat acc = Mat::Zero(m, m);
  for (int day : days) {
    acc += pairwise_distance(day_distributions(features, day).probs, metric, raw_cross_entropy);
  }
  return acc / static_cast<double>(days.size());
}

KmeansResult kmeans_centers(const Mat& points, int k, Rng& rng) {
  const auto m = points.rows();
  if (k < 1 || k > m) {
    throw std::invalid_argument("k = " + std::to_string(k) + " outside [1, " + std::to_string(m) +
                                "] points");
  }

  KmeansResult result;
  result.centers.resize(k, points.cols());
  result.assignment.assign(static_cast<std::size_t>(m), 0);

  // k-means++ seeding: first center uniform, the rest sampled proportionally
  // to squared distance from the nearest chosen center.
  std::uniform_int_distribution<Eigen::Index> first(0, m - 1);
  result.centers.row(0) = points.row(first(rng));
  Vec nearest_sq = Vec::Constant(m, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    for (Eigen::Index i = 0; i < m; ++i) {
      nearest_sq[i] = std::min(nearest_sq[i], sq_dist(points.row(i), result.centers.row(c - 1)));
    }
    const double total = nearest_sq.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double target = unit(rng) * total;
      double cum = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        cum += nearest_sq[i];
        if (cum >= target) {
          chosen = i;
          break;
        }
        chosen = i;
      }
    } else {
      chosen = first(rng);  // all points already coincide with some center
    }
    result.centers.row(c) = points.row(chosen);
  }

  std::vector<int> prev_assignment;
  for (int iter = 0; iter < 100; ++iter) {
    double sse = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      int best = 0;
      double best_sq = sq_dist(points.row(i), result.centers.row(0));
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(points.row(i), result.centers.row(c));
        if (d < best_sq) {
          best_sq = d;
          best = c;
        }
      }
      result.assignment[static_cast<std::size_t>(i)] = best;
      sse += best_sq;
    }
    result.sse_trace.push_back(sse);
    result.iterations = iter + 1;
    if (result.assignment == prev_assignment) break;
    prev_assignment = result.assignment;

    Mat sums = Mat::Zero(k, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < m; ++i) {
      const int c = result.assignment[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        result.centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
      } else {
        // Empty cluster: restart it at the point that fits its own cluster worst.
        Eigen::Index worst = 0;
        double worst_sq = -1.0;
        for (Eigen::Index i = 0; i < m; ++i) {
          const int owner = result.assignment[static_cast<std::size_t>(i)];
          const double d = sq_dist(points.row(i), result.centers.row(owner));
          if (d > worst_sq) {
            worst_sq = d;
            worst = i;
          }
        }
        result.centers.row(c) = points.row(worst);
      }
    }
  }
  return result;
}

int default_cluster_count(int m) {
  const int k = static_cast<int>(std::lround(0.10 * m));
  return std::min(m, std::max(2, k));
}

DiversityReport diversity_score(const std::vector<FeaturePanel>& features,
                                const std::vector<int>& days, DistanceMetric metric, int k,
                                std::uint64_t seed, bool raw_cross_entropy) {
  const int m = static_cast<int>(features.size());
  if (m < 2) throw std::invalid_argument("diversity needs at least 2 features");
  if (k < 1 || k > m) {
    throw std::invalid_argument("k = " + std::to_string(k) + " outside [1, " + std::to_string(m) +
                                "] features");
  }
  if (days.empty()) throw std::invalid_argument("no days to score");

  DiversityReport report;
  report.metric = metric;
  report.raw_cross_entropy = raw_cross_entropy;
  report.k = k;
  report.days = days;
  report.day_score.reserve(days.size());

  for (int day : days) {
    const DayDistributions dist = day_distributions(features, day);
    Rng rng(derive_seed(seed, "diversity", static_cast<std::uint64_t>(day)));
    const KmeansResult km = kmeans_centers(dist.probs, k, rng);
    double score = 0.0;
    if (k > 1) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) {
        const Vec ci = km.centers.row(i).transpose();
        for (int j = i + 1; j < k; ++j) {
          const Vec cj = km.centers.row(j).transpose();
          acc += distribution_distance(ci, cj, metric, raw_cross_entropy);
        }
      }
      score = acc / (0.5 * k * (k - 1));
    }
    report.day_score.push_back(score);
  }

  const auto n = static_cast<double>(report.day_score.size());
  double mean = 0.0;
  for (double s : report.day_score) mean += s;
  mean /= n;
  double var = 0.0;
  for (double s : report.day_score) var += (s - mean) * (s - mean);
  report.mean = mean;
  report.stdev = std::sqrt(var / n);
  return report;
}

}  // namespace alphakit
