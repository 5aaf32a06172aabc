#pragma once

#include "alphakit/panel.hpp"

#include <vector>

namespace alphakit {

struct SplitSpec {
  int train = 250;
  int val = 30;
  int test = 30;
  int total() const { return train + val + test; }
};

enum class Split : int { train = 0, val = 1, test = 2 };

std::string_view split_name(Split s);

/// One sample day's cross-section of standardized input windows.
struct DayCrossSection {
  int day = -1;                // panel day index
  std::vector<int> assets;     // window-valid assets, ascending
  Mat inputs;                  // input_dim x assets.size()
  Vec fwd_returns;             // per column; NaN where the forward return is invalid
  std::vector<int> pair_cols;  // columns with a valid forward return
  bool eligible = false;       // pair_cols.size() >= min_cross_section
};

/// Standardized rolling-window samples over the panel, split train/val/test.
/// Sample layout is field-major, oldest day first: coordinate f * window_len + k
/// holds field f at day t - window_len + 1 + k.
struct WindowDataset {
  int window_len = 30;
  int input_dim = 150;
  int horizon = 5;
  SplitSpec splits;
  int min_cross_section = 20;
  int first_sample_day = 29;  // window_len - 1

  Vec mean;   // per-coordinate training mean
  Vec stdev;  // per-coordinate training std; zero replaced by 1

  std::vector<DayCrossSection> days;  // one per split day

  int n_sample_days() const { return static_cast<int>(days.size()); }
  /// [begin, end) indices into `days` for a split.
  std::pair<int, int> split_range(Split s) const;
  /// Indices into `days` of batch-eligible days in a split.
  std::vector<int> eligible_days(Split s) const;
};

/// Builds standardized window samples. Training statistics come from training
/// days only; standardization never sees validation or test data.
WindowDataset build_windows(const OhlcvPanel& panel, const ForwardReturns& returns,
                            int window_len = 30, SplitSpec splits = {},
                            int min_cross_section = 20);

struct CrossSectionBatch {
  std::vector<int> day_indices;  // indices into WindowDataset::days
  std::vector<Mat> inputs;       // per day: input_dim x n_pairs
  std::vector<Vec> returns;      // per day: n_pairs
};

/// n_days distinct uniformly-sampled eligible days with their full valid cross-sections.
CrossSectionBatch sample_batch(const WindowDataset& ds, Split split, int n_days, Rng& rng);

/// Batch over explicit day indices (all valid pairs per day).
CrossSectionBatch batch_for_days(const WindowDataset& ds, const std::vector<int>& day_indices);

}  // namespace alphakit
