#pragma once

#include "alphakit/common.hpp"

namespace alphakit {

/// Squashing kernel g(x) = sigmoid(p * (x - mean) / (2 * std + epsilon))
/// applied over a batch, with mean and population std taken from the batch
/// itself. Maps the batch into (0, 1) around 0.5 while keeping its ordering.
struct KernelParams {
  double p = 1.83;
  double epsilon_std = 1e-8;
};

struct KernelForward {
  Vec g;             // kernel outputs
  Vec x;             // inputs as seen
  double mean = 0.0;
  double stdev = 0.0;  // population std
  double denom = 0.0;  // 2 * stdev + epsilon
};

KernelForward g_kernel_forward(const Vec& x, const KernelParams& params = {});
Vec g_kernel(const Vec& x, const KernelParams& params = {});

/// Exact input gradient given dL/dg; the batch mean and std are functions of
/// the inputs, so their derivatives are included.
Vec g_kernel_backward(const KernelForward& fwd, const Vec& dloss_dg,
                      const KernelParams& params = {});

}  // namespace alphakit
