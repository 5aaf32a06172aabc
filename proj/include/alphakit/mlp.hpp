#pragma once

#include "alphakit/common.hpp"

#include <filesystem>
#include <vector>

namespace alphakit {

/// Fully connected network: tanh hidden layers, linear scalar output.
struct MlpNetwork {
  std::vector<int> sizes;   // layer widths, input first
  std::vector<Mat> weights; // weights[l] maps sizes[l] -> sizes[l+1]
  std::vector<Vec> biases;

  int n_layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
  bool finite() const;

  /// Glorot-uniform weights, zero biases. Requires >= 2 sizes, scalar output.
  static MlpNetwork glorot(const std::vector<int>& sizes, Rng& rng);
};

/// Post-activation values per layer; acts[0] is the input batch.
struct ForwardCache {
  std::vector<Mat> acts;
};

/// Batch forward pass over column samples; returns one output per column.
Vec mlp_forward(const MlpNetwork& net, const Mat& inputs, ForwardCache* cache = nullptr);

struct Gradients {
  std::vector<Mat> w;
  std::vector<Vec> b;

  static Gradients zeros_like(const MlpNetwork& net);
  void accumulate(const Gradients& other);
  void scale(double s);
};

/// Backpropagates dL/doutput (one entry per batch column) through the cache,
/// adding parameter gradients into `grads`.
void mlp_backward(const MlpNetwork& net, const ForwardCache& cache, const Vec& dloss_dout,
                  Gradients& grads);

/// First-layer weight mass per input coordinate and its aggregations over the
/// field-major window layout (coordinate f * window_len + k, k oldest first).
struct ContributionVector {
  Vec per_input;
  Vec by_field;  // kNumFields entries
  Vec by_lag;    // window_len entries; lag 0 is the evaluation day
};

ContributionVector contribution(const MlpNetwork& net, int window_len);

/// Binary checkpoint format, versioned by a magic header.
void save_checkpoint(const MlpNetwork& net, const std::filesystem::path& path);
MlpNetwork load_checkpoint(const std::filesystem::path& path);

}  // namespace alphakit
