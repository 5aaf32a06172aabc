#include "alphakit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace alphakit {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void fill_sample(const OhlcvPanel& panel, int asset, int day, int window_len,
                 Eigen::Ref<Vec> out) {
  const int start = day - window_len + 1;
  for (int f = 0; f < kNumFields; ++f) {
    const Mat& grid = panel.field(static_cast<Field>(f));
    for (int k = 0; k < window_len; ++k) {
      out[f * window_len + k] = grid(asset, start + k);
    }
  }
}

}  // namespace

std::string_view split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

std::pair<int, int> WindowDataset::split_range(Split s) const {
  switch (s) {
    case Split::train: return {0, splits.train};
    case Split::val: return {splits.train, splits.train + splits.val};
    case Split::test: return {splits.train + splits.val, splits.total()};
  }
  return {0, 0};
}

std::vector<int> WindowDataset::eligible_days(Split s) const {
  auto [begin, end] = split_range(s);
  std::vector<int> out;
  for (int i = begin; i < end; ++i) {
    if (days[static_cast<std::size_t>(i)].eligible) out.push_back(i);
  }
  return out;
}

WindowDataset build_windows(const OhlcvPanel& panel, const ForwardReturns& returns,
                            int window_len, SplitSpec splits, int min_cross_section) {
  if (window_len < 1) throw std::invalid_argument("window_len must be >= 1");
  if (splits.train < 1 || splits.val < 1 || splits.test < 1) {
    throw std::invalid_argument("split sizes must be positive");
  }
  if (min_cross_section < 2) throw std::invalid_argument("min_cross_section must be >= 2");
  const int n_assets = panel.n_assets();
  const int n_days = panel.n_days();
  const int needed = window_len - 1 + splits.total();
  if (n_days < needed) {
    throw std::invalid_argument("panel has " + std::to_string(n_days) +
                                " days; window plus splits need " + std::to_string(needed));
  }
  if (returns.values.rows() != n_assets || returns.values.cols() != n_days) {
    throw std::invalid_argument("returns shape does not match panel");
  }

  WindowDataset ds;
  ds.window_len = window_len;
  ds.input_dim = kNumFields * window_len;
  ds.horizon = returns.horizon;
  ds.splits = splits;
  ds.min_cross_section = min_cross_section;
  ds.first_sample_day = window_len - 1;

  const auto prefix = panel.untradable_prefix();
  ds.days.resize(static_cast<std::size_t>(splits.total()));

  // Pass 1: raw samples per day.
  for (int i = 0; i < splits.total(); ++i) {
    DayCrossSection& dc = ds.days[static_cast<std::size_t>(i)];
    dc.day = ds.first_sample_day + i;
    for (int a = 0; a < n_assets; ++a) {
      if (window_tradable(prefix, a, dc.day - window_len + 1, dc.day)) dc.assets.push_back(a);
    }
    dc.inputs.resize(ds.input_dim, static_cast<Eigen::Index>(dc.assets.size()));
    dc.fwd_returns.resize(static_cast<Eigen::Index>(dc.assets.size()));
    for (std::size_t c = 0; c < dc.assets.size(); ++c) {
      fill_sample(panel, dc.assets[c], dc.day, window_len,
                  dc.inputs.col(static_cast<Eigen::Index>(c)));
      const int a = dc.assets[c];
      if (returns.valid(a, dc.day)) {
        dc.fwd_returns[static_cast<Eigen::Index>(c)] = returns.values(a, dc.day);
        dc.pair_cols.push_back(static_cast<int>(c));
      } else {
        dc.fwd_returns[static_cast<Eigen::Index>(c)] = kNan;
      }
    }
    dc.eligible = static_cast<int>(dc.pair_cols.size()) >= min_cross_section;
  }

  // Pass 2: per-coordinate statistics over training samples only.
  Vec sum = Vec::Zero(ds.input_dim);
  Vec sumsq = Vec::Zero(ds.input_dim);
  long count = 0;
  for (int i = 0; i < splits.train; ++i) {
    const DayCrossSection& dc = ds.days[static_cast<std::size_t>(i)];
    if (dc.inputs.cols() == 0) continue;
    sum += dc.inputs.rowwise().sum();
    sumsq += dc.inputs.array().square().matrix().rowwise().sum();
    count += dc.inputs.cols();
  }
  if (count == 0) throw std::invalid_argument("no training samples; panel too sparse");
  ds.mean = sum / static_cast<double>(count);
  Vec var = sumsq / static_cast<double>(count) - ds.mean.array().square().matrix();
  ds.stdev = var.array().max(0.0).sqrt();
  for (Eigen::Index j = 0; j < ds.stdev.size(); ++j) {
    if (ds.stdev[j] == 0.0) ds.stdev[j] = 1.0;
  }

  // Pass 3: standardize every split with training statistics.
  for (auto& dc : ds.days) {
    dc.inputs = (dc.inputs.colwise() - ds.mean).array().colwise() / ds.stdev.array();
  }
  return ds;
}

CrossSectionBatch sample_batch(const WindowDataset& ds, Split split, int n_days, Rng& rng) {
  if (n_days < 1) throw std::invalid_argument("batch size must be >= 1");
  std::vector<int> pool = ds.eligible_days(split);
  if (static_cast<int>(pool.size()) < n_days) {
    throw std::runtime_error(std::string("not enough eligible ") +
                             std::string(split_name(split)) + " days: have " +
                             std::to_string(pool.size()) + ", need " + std::to_string(n_days));
  }
  for (int i = 0; i < n_days; ++i) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i),
                                                    pool.size() - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
  }
  pool.resize(static_cast<std::size_t>(n_days));
  std::sort(pool.begin(), pool.end());
  return batch_for_days(ds, pool);
}

CrossSectionBatch batch_for_days(const WindowDataset& ds, const std::vector<int>& day_indices) {
  CrossSectionBatch batch;
  batch.day_indices = day_indices;
  batch.inputs.reserve(day_indices.size());
  batch.returns.reserve(day_indices.size());
  for (int idx : day_indices) {
    const DayCrossSection& dc = ds.days.at(static_cast<std::size_t>(idx));
    Mat x(ds.input_dim, static_cast<Eigen::Index>(dc.pair_cols.size()));
    Vec r(static_cast<Eigen::Index>(dc.pair_cols.size()));
    for (std::size_t c = 0; c < dc.pair_cols.size(); ++c) {
      x.col(static_cast<Eigen::Index>(c)) = dc.inputs.col(dc.pair_cols[c]);
      r[static_cast<Eigen::Index>(c)] = dc.fwd_returns[dc.pair_cols[c]];
    }
    batch.inputs.push_back(std::move(x));
    batch.returns.push_back(std::move(r));
  }
  return batch;
}

}  // namespace alphakit
