#include "alphakit/synthetic.hpp"

#include "alphakit/classical.hpp"
#include "alphakit/expr_eval.hpp"
#include "alphakit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

namespace alphakit {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Days since 1970-01-01 for a civil date (valid across the relevant range).
long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097L + static_cast<long>(doe) - 719468L;
}

void civil_from_days(long z, int& y, int& m, int& d) {
  z += 719468L;
  const long era = (z >= 0 ? z : z - 146096L) / 146097L;
  const unsigned doe = static_cast<unsigned>(z - era * 146097L);
  const unsigned yoe = (doe - doe / 1460u + doe / 36524u - doe / 146096u) / 365u;
  const long yr = static_cast<long>(yoe) + era * 400L;
  const unsigned doy = doe - (365u * yoe + yoe / 4u - yoe / 100u);
  const unsigned mp = (5u * doy + 2u) / 153u;
  d = static_cast<int>(doy - (153u * mp + 2u) / 5u + 1u);
  m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  y = static_cast<int>(yr + (m <= 2));
}

// Consecutive weekdays starting 2018-01-02.
std::vector<std::string> trading_dates(int n) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  long z = days_from_civil(2018, 1, 2);
  while (static_cast<int>(out.size()) < n) {
    const int weekday = static_cast<int>((z + 4) % 7);  // 0 = Sunday
    if (weekday != 0 && weekday != 6) {
      int y, m, d;
      civil_from_days(z, y, m, d);
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
      out.emplace_back(buf);
    }
    ++z;
  }
  return out;
}

Vec zscore_cross_section(const Vec& x) {
  const double n = static_cast<double>(x.size());
  const double mean = x.sum() / n;
  const double var = (x.array() - mean).square().sum() / n;
  if (var <= 0.0) return Vec::Zero(x.size());
  return ((x.array() - mean) / std::sqrt(var)).matrix();
}

}  // namespace

void SynthConfig::validate() const {
  if (n_assets < 2) throw ConfigError("n_assets must be >= 2");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (base_vol <= 0.0) throw ConfigError("base_vol must be > 0");
  if (base_price <= 0.0) throw ConfigError("base_price must be > 0");
  if (base_volume <= 0.0) throw ConfigError("base_volume must be > 0");
  if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  int lookback = 0;
  try {
    lookback = classical_expr(planted_feature).lookback();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("planted_feature: ") + e.what());
  }
  const int needed = std::max(31 + horizon, lookback + 2 * horizon + 2);
  if (n_days < needed) {
    throw ConfigError("n_days must be >= " + std::to_string(needed) +
                      " for this feature and horizon, got " + std::to_string(n_days));
  }
}

SynthResult generate_synthetic_panel(const SynthConfig& cfg) {
  cfg.validate();
  const AlphaExpr expr = classical_expr(cfg.planted_feature);
  const int lb = expr.lookback();
  const int na = cfg.n_assets;
  const int nd = cfg.n_days;
  const int h = cfg.horizon;
  const int s0 = lb;       // first day the planted feature is defined
  const int u0 = s0 + h;   // first day driven by the signal chain

  SynthResult res;
  OhlcvPanel& panel = res.panel;
  for (int a = 0; a < na; ++a) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "SYN%04d", a);
    panel.assets.emplace_back(buf);
  }
  panel.days = trading_dates(nd);
  for (auto& grid : panel.values) grid = Mat::Zero(na, nd);
  panel.tradable = BoolGrid::Constant(na, nd, true);

  Rng init_rng(derive_seed(cfg.seed, "synth.init"));
  Rng walk_rng(derive_seed(cfg.seed, "synth.walk"));
  Rng noise_rng(derive_seed(cfg.seed, "synth.noise"));
  Rng shade_rng(derive_seed(cfg.seed, "synth.shade"));
  Rng volume_rng(derive_seed(cfg.seed, "synth.volume"));
  std::uniform_real_distribution<double> level(-0.2, 0.2);
  std::normal_distribution<double> walk(0.0, cfg.base_vol);
  std::normal_distribution<double> eps(0.0, cfg.noise_sigma);
  std::normal_distribution<double> shade(0.0, cfg.base_vol * 0.5);
  std::normal_distribution<double> vol_noise(0.0, 0.5);

  Mat logc = Mat::Zero(na, nd);
  Mat feature = Mat::Zero(na, nd);  // raw planted feature, defined from s0
  Mat zfeat = Mat::Zero(na, nd);

  auto fill_day = [&](int u) {
    for (int a = 0; a < na; ++a) {
      const double close = std::exp(logc(a, u));
      const double open = close * std::exp(shade(shade_rng));
      const double hi = std::max(open, close) * std::exp(std::abs(shade(shade_rng)));
      const double lo = std::min(open, close) * std::exp(-std::abs(shade(shade_rng)));
      panel.values[static_cast<int>(Field::open)](a, u) = open;
      panel.values[static_cast<int>(Field::high)](a, u) = hi;
      panel.values[static_cast<int>(Field::low)](a, u) = lo;
      panel.values[static_cast<int>(Field::close)](a, u) = close;
      panel.values[static_cast<int>(Field::volume)](a, u) =
          cfg.base_volume * std::exp(vol_noise(volume_rng));
    }
    if (u >= s0) {
      const CrossSection cs = evaluate(expr, panel, u);
      Vec raw(static_cast<Eigen::Index>(cs.assets.size()));
      for (std::size_t i = 0; i < cs.assets.size(); ++i) {
        raw[static_cast<Eigen::Index>(i)] = cs.values[static_cast<Eigen::Index>(i)];
      }
      const Vec z = zscore_cross_section(raw);
      for (std::size_t i = 0; i < cs.assets.size(); ++i) {
        feature(cs.assets[i], u) = raw[static_cast<Eigen::Index>(i)];
        zfeat(cs.assets[i], u) = z[static_cast<Eigen::Index>(i)];
      }
    }
  };

  for (int a = 0; a < na; ++a) logc(a, 0) = std::log(cfg.base_price) + level(init_rng);
  fill_day(0);
  for (int u = 1; u < nd; ++u) {
    if (u < u0) {
      for (int a = 0; a < na; ++a) logc(a, u) = logc(a, u - 1) + walk(walk_rng);
    } else {
      // The return realized from day u-h to u is exactly beta*z + noise, so
      // the feature at u-h predicts it by construction.
      for (int a = 0; a < na; ++a) {
        const double target =
            std::max(cfg.signal_beta * zfeat(a, u - h) + eps(noise_rng), -0.95);
        logc(a, u) = logc(a, u - h) + std::log1p(target);
      }
    }
    fill_day(u);
  }

  res.first_feature_day = s0;
  res.oracle.values = feature;
  res.oracle.valid = BoolGrid::Constant(na, nd, false);
  for (int t = s0; t < nd; ++t) {
    for (int a = 0; a < na; ++a) res.oracle.valid(a, t) = true;
  }

  const ForwardReturns fwd = forward_return(panel, h);
  res.oracle_ic_by_day = Vec::Constant(nd, kNan);
  double sum = 0.0;
  int count = 0;
  for (int t = s0; t + h < nd; ++t) {
    res.oracle_ic_by_day[t] = spearman_exact(feature.col(t), fwd.values.col(t));
    sum += res.oracle_ic_by_day[t];
    ++count;
  }
  res.oracle_ic_mean = count > 0 ? sum / count : 0.0;
  return res;
}

}  // namespace alphakit
