#pragma once

#include "alphakit/panel.hpp"

#include <cstdint>
#include <string>

namespace alphakit {

/// Controls the planted-signal market generator. Forward returns over
/// `horizon` days equal signal_beta * z + noise, where z is the day's
/// cross-sectionally standardized planted feature, so the feature's
/// predictive strength is tunable: noise_sigma -> 0 drives the per-day rank
/// correlation between feature and realized forward return toward 1, and
/// signal_beta = 0 removes the signal entirely.
struct SynthConfig {
  int n_assets = 100;
  int n_days = 340;
  std::uint64_t seed = 42;
  std::string planted_feature = "momentum_5";
  double signal_beta = 0.013;
  double noise_sigma = 0.02;
  double base_vol = 0.01;
  /// Price level around which the panel is generated. Ranks and returns are
  /// level-free, but raw feature spreads (and so softmax diversity) are not;
  /// the unit default keeps price-difference features comparable to ratios.
  double base_price = 1.0;
  /// Median share volume, same unit argument as base_price: volume-derived
  /// features inherit this scale, so the default keeps them comparable too.
  double base_volume = 1.0;
  int horizon = 5;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct SynthResult {
  OhlcvPanel panel;
  FeaturePanel oracle;     // planted feature values, valid once its lookback is covered
  int first_feature_day = 0;
  Vec oracle_ic_by_day;    // per-day rank IC of oracle vs realized returns; NaN where undefined
  double oracle_ic_mean = 0.0;
};

SynthResult generate_synthetic_panel(const SynthConfig& cfg);

}  // namespace alphakit
