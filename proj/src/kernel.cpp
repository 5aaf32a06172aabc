#include "alphakit/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace alphakit {

namespace {

double sigmoid(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

KernelForward g_kernel_forward(const Vec& x, const KernelParams& params) {
  if (x.size() == 0) throw std::invalid_argument("kernel input is empty");
  KernelForward fwd;
  fwd.x = x;
  const double n = static_cast<double>(x.size());
  fwd.mean = x.sum() / n;
  fwd.stdev = std::sqrt((x.array() - fwd.mean).square().sum() / n);
  fwd.denom = 2.0 * fwd.stdev + params.epsilon_std;
  fwd.g.resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    fwd.g[i] = sigmoid(params.p * (x[i] - fwd.mean) / fwd.denom);
  }
  return fwd;
}

Vec g_kernel(const Vec& x, const KernelParams& params) {
  return g_kernel_forward(x, params).g;
}

Vec g_kernel_backward(const KernelForward& fwd, const Vec& dloss_dg,
                      const KernelParams& params) {
  if (dloss_dg.size() != fwd.x.size()) {
    throw std::invalid_argument("gradient length does not match kernel batch");
  }
  const Eigen::Index n = fwd.x.size();
  const double dn = static_cast<double>(n);
  const double d = fwd.denom;

  // a_i = dL/du_i with u_i = (x_i - mean) / denom.
  Vec a(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a[i] = dloss_dg[i] * fwd.g[i] * (1.0 - fwd.g[i]) * params.p;
  }
  const double a_sum = a.sum();
  Vec grad = (a.array() / d - a_sum / (dn * d)).matrix();
  if (fwd.stdev > 0.0) {
    // Through std: d(std)/dx_j = (x_j - mean) / (n * std).
    double weighted = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) weighted += a[i] * (fwd.x[i] - fwd.mean);
    const double coef = 2.0 * weighted / (dn * fwd.stdev * d * d);
    grad -= (coef * (fwd.x.array() - fwd.mean)).matrix();
  }
  return grad;
}

}  // namespace alphakit
