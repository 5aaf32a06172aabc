#pragma once

#include "alphakit/kernel.hpp"

#include <vector>

namespace alphakit {

/// Differentiable surrogate for the per-day rank correlation between model
/// outputs and forward returns: outputs are squashed by the batch kernel,
/// returns are reduced to their (rank-1)/(n-1) positions (no gradient flows
/// through them), and the two are compared with Pearson correlation. The
/// loss is the negated mean over the batch's days; a day whose kernel
/// outputs or return ranks have zero variance contributes zero loss and
/// zero gradient but still counts in the denominator.
struct SurrogateLossResult {
  double loss = 0.0;
  std::vector<Vec> grad;          // dLoss/doutputs per day
  std::vector<double> day_corr;   // per-day Pearson term, 0 when degenerate
  std::vector<char> day_degenerate;
  int degenerate_days = 0;
};

SurrogateLossResult surrogate_ic_loss(const std::vector<Vec>& outputs,
                                      const std::vector<Vec>& returns,
                                      const KernelParams& params = {});

}  // namespace alphakit
