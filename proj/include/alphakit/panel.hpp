#pragma once

#include "alphakit/common.hpp"

#include <vector>

namespace alphakit {

/// Rectangular asset x trading-day grid of OHLCV values with a tradability mask.
/// Untradable cells stay in the grid (flagged, never absent).
struct OhlcvPanel {
  std::vector<std::string> assets;  // sorted asset ids
  std::vector<std::string> days;    // sorted ISO-8601 dates, strictly increasing
  std::array<Mat, kNumFields> values;  // each n_assets x n_days
  BoolGrid tradable;                   // n_assets x n_days

  int n_assets() const { return static_cast<int>(assets.size()); }
  int n_days() const { return static_cast<int>(days.size()); }

  const Mat& field(Field f) const { return values[static_cast<int>(f)]; }
  Mat& field(Field f) { return values[static_cast<int>(f)]; }

  /// Prefix counts of untradable cells per asset; column t holds the count in days [0, t].
  /// Used for O(1) "fully tradable over a day window" queries.
  Eigen::ArrayXXi untradable_prefix() const;

  /// Checks grid shapes, day ordering, and price positivity on tradable cells.
  /// Throws std::runtime_error on violation.
  void validate() const;
};

/// True when asset `a` is tradable on every day in [lo, hi].
bool window_tradable(const Eigen::ArrayXXi& prefix, int a, int lo, int hi);

struct ForwardReturns {
  int horizon = 0;
  Mat values;      // n_assets x n_days, simple returns
  BoolGrid valid;  // false where either endpoint untradable or t + horizon out of range
};

/// Simple close-to-close forward return over `horizon` trading days.
ForwardReturns forward_return(const OhlcvPanel& panel, int horizon);

/// One feature's values over the panel grid.
struct FeaturePanel {
  Mat values;      // n_assets x n_days
  BoolGrid valid;  // where the feature is defined
};

}  // namespace alphakit
