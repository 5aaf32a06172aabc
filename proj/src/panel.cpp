#include "alphakit/panel.hpp"

#include <stdexcept>

namespace alphakit {

Eigen::ArrayXXi OhlcvPanel::untradable_prefix() const {
  const int na = n_assets();
  const int nd = n_days();
  Eigen::ArrayXXi prefix(na, nd);
  for (int a = 0; a < na; ++a) {
    int count = 0;
    for (int t = 0; t < nd; ++t) {
      if (!tradable(a, t)) ++count;
      prefix(a, t) = count;
    }
  }
  return prefix;
}

bool window_tradable(const Eigen::ArrayXXi& prefix, int a, int lo, int hi) {
  if (lo < 0 || hi >= prefix.cols() || lo > hi) return false;
  const int before = lo > 0 ? prefix(a, lo - 1) : 0;
  return prefix(a, hi) - before == 0;
}

void OhlcvPanel::validate() const {
  const int na = n_assets();
  const int nd = n_days();
  if (na == 0 || nd == 0) throw std::runtime_error("panel: empty grid");
  for (const auto& m : values) {
    if (m.rows() != na || m.cols() != nd) throw std::runtime_error("panel: field shape mismatch");
  }
  if (tradable.rows() != na || tradable.cols() != nd)
    throw std::runtime_error("panel: tradable mask shape mismatch");
  for (int t = 1; t < nd; ++t) {
    if (!(days[t - 1] < days[t]))
      throw std::runtime_error("panel: days not strictly increasing at " + days[t]);
  }
  for (int a = 0; a < na; ++a) {
    for (int t = 0; t < nd; ++t) {
      if (!tradable(a, t)) continue;
      for (int f = 0; f < 4; ++f) {  // price fields
        if (!(values[f](a, t) > 0.0))
          throw std::runtime_error("panel: non-positive price for " + assets[a] + " on " + days[t]);
      }
      if (values[static_cast<int>(Field::volume)](a, t) < 0.0)
        throw std::runtime_error("panel: negative volume for " + assets[a] + " on " + days[t]);
    }
  }
}

ForwardReturns forward_return(const OhlcvPanel& panel, int horizon) {
  if (horizon < 1) throw std::invalid_argument("forward_return: horizon must be >= 1");
  if (horizon >= panel.n_days())
    throw std::invalid_argument("forward_return: horizon >= number of days");
  const int na = panel.n_assets();
  const int nd = panel.n_days();
  const Mat& close = panel.field(Field::close);

  ForwardReturns out;
  out.horizon = horizon;
  out.values = Mat::Zero(na, nd);
  out.valid = BoolGrid::Constant(na, nd, false);
  for (int a = 0; a < na; ++a) {
    for (int t = 0; t + horizon < nd; ++t) {
      if (!panel.tradable(a, t) || !panel.tradable(a, t + horizon)) continue;
      out.values(a, t) = close(a, t + horizon) / close(a, t) - 1.0;
      out.valid(a, t) = true;
    }
  }
  return out;
}

}  // namespace alphakit
