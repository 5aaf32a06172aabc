#include "alphakit/loss.hpp"

#include "alphakit/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace alphakit {

SurrogateLossResult surrogate_ic_loss(const std::vector<Vec>& outputs,
                                      const std::vector<Vec>& returns,
                                      const KernelParams& params) {
  if (outputs.size() != returns.size()) {
    throw std::invalid_argument("outputs and returns must cover the same days");
  }
  if (outputs.empty()) throw std::invalid_argument("empty batch");

  SurrogateLossResult res;
  res.grad.reserve(outputs.size());
  res.day_corr.reserve(outputs.size());
  res.day_degenerate.reserve(outputs.size());
  const double batch = static_cast<double>(outputs.size());

  for (std::size_t day = 0; day < outputs.size(); ++day) {
    const Vec& y = outputs[day];
    const Vec& r = returns[day];
    if (y.size() != r.size()) {
      throw std::invalid_argument("day " + std::to_string(day) +
                                  ": outputs and returns differ in length");
    }
    if (y.size() < 2) {
      throw std::invalid_argument("day " + std::to_string(day) + ": needs >= 2 samples");
    }

    const KernelForward kf = g_kernel_forward(y, params);
    const Vec v = rank01(r);
    const Eigen::Index n = y.size();
    const double dn = static_cast<double>(n);

    const double gm = kf.g.sum() / dn;
    const double vm = v.sum() / dn;
    double sgg = 0.0, svv = 0.0, sgv = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dg = kf.g[i] - gm;
      const double dv = v[i] - vm;
      sgg += dg * dg;
      svv += dv * dv;
      sgv += dg * dv;
    }

    if (sgg <= 1e-30 || svv <= 1e-30) {
      res.day_corr.push_back(0.0);
      res.day_degenerate.push_back(1);
      res.grad.push_back(Vec::Zero(n));
      ++res.degenerate_days;
      continue;
    }

    const double denom = std::sqrt(sgg * svv);
    const double corr = sgv / denom;
    res.day_corr.push_back(corr);
    res.day_degenerate.push_back(0);
    res.loss -= corr / batch;

    // dCorr/dg_i = ((v_i - vm) - (sgv/sgg)(g_i - gm)) / denom.
    Vec dcorr_dg(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      dcorr_dg[i] = ((v[i] - vm) - (sgv / sgg) * (kf.g[i] - gm)) / denom;
    }
    const Vec dloss_dg = (-1.0 / batch) * dcorr_dg;
    res.grad.push_back(g_kernel_backward(kf, dloss_dg, params));
  }
  return res;
}

}  // namespace alphakit
