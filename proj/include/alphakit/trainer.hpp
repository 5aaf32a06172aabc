#pragma once

#include "alphakit/dataset.hpp"
#include "alphakit/loss.hpp"
#include "alphakit/mlp.hpp"

#include <vector>

namespace alphakit {

struct TrainConfig {
  std::vector<int> hidden = {64, 32};
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int batch_days = 10;
  int batches_per_epoch = 25;
  int max_epochs = 200;
  int patience = 10;           // epochs without val improvement before stopping
  int pretrain_epochs = 60;    // budget when chasing a fidelity target
  int pretrain_epochs_random = 8;  // budget when the teacher is noise
  double pretrain_fidelity = 0.9;
  KernelParams kernel;

  void validate() const;  // throws ConfigError naming the field
};

struct AdamState {
  std::vector<Mat> mw, vw;
  std::vector<Vec> mb, vb;
  long step = 0;

  static AdamState zeros_like(const MlpNetwork& net);
};

void adam_update(MlpNetwork& net, AdamState& state, const Gradients& grads,
                 const TrainConfig& cfg);

/// One optimizer step on a day batch; returns the surrogate loss.
/// Throws std::runtime_error if the loss turns non-finite.
double train_step(MlpNetwork& net, AdamState& state, const CrossSectionBatch& batch,
                  const TrainConfig& cfg);

/// Mean exact rank IC of network outputs against forward returns over a
/// split's eligible days; degenerate days contribute zero.
double split_ic(const MlpNetwork& net, const WindowDataset& ds, Split split);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_ic = 0.0;
  ContributionVector contrib;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  double initial_val_ic = 0.0;  // untrained baseline; best_epoch 0 means it held up
  int best_epoch = 0;
  double best_val_ic = 0.0;
  bool stopped_early = false;
};

/// Surrogate-loss training with early stopping on validation IC. The weights
/// from the best validation epoch are restored before returning.
TrainResult train(MlpNetwork& net, const WindowDataset& ds, const TrainConfig& cfg, Rng& rng);

struct PretrainResult {
  int epochs = 0;
  double fidelity = 0.0;   // mean per-day rank IC between net and teacher on train days
  bool reached_target = false;
};

/// Regression pretraining toward a teacher feature: minimizes MSE against the
/// teacher's per-day standardized values on training days, stopping once the
/// net's outputs track the teacher's ranking (fidelity target) or the epoch
/// budget runs out. `chase_fidelity` distinguishes feature teachers from pure
/// noise teachers, which cannot be tracked and only get the short budget.
PretrainResult pretrain(MlpNetwork& net, const FeaturePanel& teacher, const WindowDataset& ds,
                        const TrainConfig& cfg, Rng& rng, bool chase_fidelity = true);

/// Network outputs arranged as a feature panel: valid on every dataset day
/// for every window-valid asset.
FeaturePanel net_feature_panel(const MlpNetwork& net, const WindowDataset& ds, int n_assets,
                               int n_days);

}  // namespace alphakit
