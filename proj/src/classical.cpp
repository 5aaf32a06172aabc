#include "alphakit/classical.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace alphakit {

namespace {

// Postfix definitions of the stock features. momentum uses close/close[-d] - 1,
// volatility the std of daily close-over-close returns.
constexpr std::array<std::pair<const char*, const char*>, 8> kFeatures{{
    {"momentum_5", "close close delay_5 safe_div 1 sub"},
    {"momentum_20", "close close delay_20 safe_div 1 sub"},
    {"reversal_5", "close close delay_5 safe_div 1 sub neg"},
    {"volatility_20", "close delta_1 close delay_1 safe_div ts_std_20"},
    {"volume_ratio_5_20", "volume ts_mean_5 volume ts_mean_20 safe_div"},
    {"range_hl_10", "high low sub close safe_div ts_mean_10"},
    {"close_to_ts_max_20", "close close ts_max_20 safe_div"},
    {"zscore_close_10", "close close ts_mean_10 sub close ts_std_10 safe_div"},
}};

}  // namespace

const std::vector<std::string>& classical_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    out.reserve(kFeatures.size());
    for (const auto& [name, text] : kFeatures) out.emplace_back(name);
    return out;
  }();
  return names;
}

const std::string& classical_feature_source(const std::string& name) {
  static const std::vector<std::string> sources = [] {
    std::vector<std::string> out;
    out.reserve(kFeatures.size());
    for (const auto& [n, text] : kFeatures) out.emplace_back(text);
    return out;
  }();
  for (std::size_t i = 0; i < kFeatures.size(); ++i) {
    if (name == kFeatures[i].first) return sources[i];
  }
  std::string msg = "unknown feature '" + name + "'; available:";
  for (const auto& [n, text] : kFeatures) {
    msg += ' ';
    msg += n;
  }
  throw std::invalid_argument(msg);
}

AlphaExpr classical_expr(const std::string& name) {
  return parse_rpn(classical_feature_source(name));
}

}  // namespace alphakit
