#include "alphakit/trainer.hpp"

#include "alphakit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alphakit {

namespace {

// Per-day teacher targets on training days: standardized teacher values for
// window-valid assets the teacher covers.
struct TeacherDay {
  int day_index = 0;          // index into ds.days
  std::vector<int> cols;      // sample columns with a teacher value
  Vec targets;                // standardized teacher values
  Vec raw;                    // unstandardized, for fidelity ranking
};

std::vector<TeacherDay> teacher_days(const FeaturePanel& teacher, const WindowDataset& ds) {
  std::vector<TeacherDay> out;
  const auto [tb, te] = ds.split_range(Split::train);
  for (int i = tb; i < te; ++i) {
    const DayCrossSection& dc = ds.days[static_cast<std::size_t>(i)];
    TeacherDay td;
    td.day_index = i;
    for (std::size_t c = 0; c < dc.assets.size(); ++c) {
      if (teacher.valid(dc.assets[c], dc.day)) td.cols.push_back(static_cast<int>(c));
    }
    if (td.cols.size() < 2) continue;
    td.raw.resize(static_cast<Eigen::Index>(td.cols.size()));
    for (std::size_t k = 0; k < td.cols.size(); ++k) {
      td.raw[static_cast<Eigen::Index>(k)] =
          teacher.values(dc.assets[static_cast<std::size_t>(td.cols[k])], dc.day);
    }
    const double n = static_cast<double>(td.raw.size());
    const double mean = td.raw.sum() / n;
    const double sd = std::sqrt((td.raw.array() - mean).square().sum() / n);
    if (sd > 0.0) {
      td.targets = ((td.raw.array() - mean) / sd).matrix();
    } else {
      td.targets = Vec::Zero(td.raw.size());
    }
    out.push_back(std::move(td));
  }
  return out;
}

Mat gather_cols(const Mat& m, const std::vector<int>& cols) {
  Mat out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = m.col(cols[i]);
  }
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (hidden.empty()) throw ConfigError("hidden layers must not be empty");
  for (int h : hidden) {
    if (h < 1) throw ConfigError("hidden layer sizes must be positive");
  }
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
  if (beta1 < 0.0 || beta1 >= 1.0) throw ConfigError("beta1 must be in [0, 1)");
  if (beta2 < 0.0 || beta2 >= 1.0) throw ConfigError("beta2 must be in [0, 1)");
  if (adam_epsilon <= 0.0) throw ConfigError("adam_epsilon must be > 0");
  if (batch_days < 1) throw ConfigError("batch_days must be >= 1");
  if (batches_per_epoch < 1) throw ConfigError("batches_per_epoch must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (patience < 0) throw ConfigError("patience must be >= 0");
  if (pretrain_epochs < 1) throw ConfigError("pretrain_epochs must be >= 1");
  if (pretrain_epochs_random < 1) throw ConfigError("pretrain_epochs_random must be >= 1");
  if (pretrain_fidelity <= 0.0 || pretrain_fidelity > 1.0) {
    throw ConfigError("pretrain_fidelity must be in (0, 1]");
  }
  if (kernel.p <= 0.0) throw ConfigError("kernel p must be > 0");
  if (kernel.epsilon_std <= 0.0) throw ConfigError("kernel epsilon must be > 0");
}

AdamState AdamState::zeros_like(const MlpNetwork& net) {
  AdamState s;
  for (const Mat& w : net.weights) {
    s.mw.push_back(Mat::Zero(w.rows(), w.cols()));
    s.vw.push_back(Mat::Zero(w.rows(), w.cols()));
  }
  for (const Vec& b : net.biases) {
    s.mb.push_back(Vec::Zero(b.size()));
    s.vb.push_back(Vec::Zero(b.size()));
  }
  return s;
}

void adam_update(MlpNetwork& net, AdamState& state, const Gradients& grads,
                 const TrainConfig& cfg) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    state.mw[l] = cfg.beta1 * state.mw[l] + (1.0 - cfg.beta1) * grads.w[l];
    state.vw[l] =
        cfg.beta2 * state.vw[l] + (1.0 - cfg.beta2) * grads.w[l].array().square().matrix();
    const Mat mhat = state.mw[l] / bc1;
    const Mat vhat = state.vw[l] / bc2;
    net.weights[l].array() -=
        cfg.learning_rate * mhat.array() / (vhat.array().sqrt() + cfg.adam_epsilon);

    state.mb[l] = cfg.beta1 * state.mb[l] + (1.0 - cfg.beta1) * grads.b[l];
    state.vb[l] =
        cfg.beta2 * state.vb[l] + (1.0 - cfg.beta2) * grads.b[l].array().square().matrix();
    const Vec mbh = state.mb[l] / bc1;
    const Vec vbh = state.vb[l] / bc2;
    net.biases[l].array() -=
        cfg.learning_rate * mbh.array() / (vbh.array().sqrt() + cfg.adam_epsilon);
  }
}

double train_step(MlpNetwork& net, AdamState& state, const CrossSectionBatch& batch,
                  const TrainConfig& cfg) {
  std::vector<ForwardCache> caches(batch.inputs.size());
  std::vector<Vec> outputs;
  outputs.reserve(batch.inputs.size());
  for (std::size_t d = 0; d < batch.inputs.size(); ++d) {
    outputs.push_back(mlp_forward(net, batch.inputs[d], &caches[d]));
  }
  const SurrogateLossResult lr = surrogate_ic_loss(outputs, batch.returns, cfg.kernel);
  if (!std::isfinite(lr.loss)) {
    throw std::runtime_error("surrogate loss is not finite; aborting training");
  }
  Gradients grads = Gradients::zeros_like(net);
  for (std::size_t d = 0; d < batch.inputs.size(); ++d) {
    mlp_backward(net, caches[d], lr.grad[d], grads);
  }
  adam_update(net, state, grads, cfg);
  if (!net.finite()) {
    throw std::runtime_error("network weights turned non-finite during training");
  }
  return lr.loss;
}

double split_ic(const MlpNetwork& net, const WindowDataset& ds, Split split) {
  const std::vector<int> days = ds.eligible_days(split);
  if (days.empty()) return 0.0;
  double sum = 0.0;
  for (int idx : days) {
    const DayCrossSection& dc = ds.days[static_cast<std::size_t>(idx)];
    const Mat x = gather_cols(dc.inputs, dc.pair_cols);
    const Vec y = mlp_forward(net, x);
    Vec r(static_cast<Eigen::Index>(dc.pair_cols.size()));
    for (std::size_t k = 0; k < dc.pair_cols.size(); ++k) {
      r[static_cast<Eigen::Index>(k)] = dc.fwd_returns[dc.pair_cols[k]];
    }
    sum += spearman_exact(y, r);  // degenerate days count as zero
  }
  return sum / static_cast<double>(days.size());
}

TrainResult train(MlpNetwork& net, const WindowDataset& ds, const TrainConfig& cfg, Rng& rng) {
  TrainResult result;
  std::vector<Mat> best_weights = net.weights;
  std::vector<Vec> best_biases = net.biases;
  result.initial_val_ic = split_ic(net, ds, Split::val);
  result.best_val_ic = result.initial_val_ic;
  result.best_epoch = 0;
  int since_improve = 0;
  AdamState state = AdamState::zeros_like(net);

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    for (int b = 0; b < cfg.batches_per_epoch; ++b) {
      const CrossSectionBatch batch = sample_batch(ds, Split::train, cfg.batch_days, rng);
      loss_sum += train_step(net, state, batch, cfg);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / cfg.batches_per_epoch;
    rec.val_ic = split_ic(net, ds, Split::val);
    rec.contrib = contribution(net, ds.window_len);
    result.history.push_back(std::move(rec));

    if (result.history.back().val_ic > result.best_val_ic) {
      result.best_val_ic = result.history.back().val_ic;
      result.best_epoch = epoch;
      best_weights = net.weights;
      best_biases = net.biases;
      since_improve = 0;
    } else {
      ++since_improve;
    }
    if (since_improve >= cfg.patience) {
      result.stopped_early = epoch < cfg.max_epochs;
      break;
    }
  }
  net.weights = std::move(best_weights);
  net.biases = std::move(best_biases);
  return result;
}

PretrainResult pretrain(MlpNetwork& net, const FeaturePanel& teacher, const WindowDataset& ds,
                        const TrainConfig& cfg, Rng& rng, bool chase_fidelity) {
  const std::vector<TeacherDay> days = teacher_days(teacher, ds);
  PretrainResult res;
  if (days.empty()) return res;

  AdamState state = AdamState::zeros_like(net);
  const int budget = chase_fidelity ? cfg.pretrain_epochs : cfg.pretrain_epochs_random;

  auto fidelity = [&]() {
    double sum = 0.0;
    for (const TeacherDay& td : days) {
      const DayCrossSection& dc = ds.days[static_cast<std::size_t>(td.day_index)];
      const Vec y = mlp_forward(net, gather_cols(dc.inputs, td.cols));
      sum += spearman_exact(y, td.raw);
    }
    return sum / static_cast<double>(days.size());
  };

  for (int epoch = 1; epoch <= budget; ++epoch) {
    for (int b = 0; b < cfg.batches_per_epoch; ++b) {
      // Sample day indices with replacement across usable teacher days.
      Gradients grads = Gradients::zeros_like(net);
      long total = 0;
      std::vector<std::pair<const TeacherDay*, ForwardCache>> touched;
      std::vector<Vec> outs;
      std::uniform_int_distribution<std::size_t> pick(0, days.size() - 1);
      const int take = std::min<int>(cfg.batch_days, static_cast<int>(days.size()));
      for (int k = 0; k < take; ++k) {
        const TeacherDay& td = days[pick(rng)];
        total += static_cast<long>(td.cols.size());
        touched.emplace_back(&td, ForwardCache{});
      }
      for (auto& [tdp, cache] : touched) {
        const DayCrossSection& dc = ds.days[static_cast<std::size_t>(tdp->day_index)];
        outs.push_back(mlp_forward(net, gather_cols(dc.inputs, tdp->cols), &cache));
      }
      double loss = 0.0;
      for (std::size_t k = 0; k < touched.size(); ++k) {
        const Vec diff = outs[k] - touched[k].first->targets;
        loss += diff.squaredNorm();
        const Vec dloss = (2.0 / static_cast<double>(total)) * diff;
        mlp_backward(net, touched[k].second, dloss, grads);
      }
      if (!std::isfinite(loss)) {
        throw std::runtime_error("pretraining loss is not finite");
      }
      adam_update(net, state, grads, cfg);
    }
    res.epochs = epoch;
    if (chase_fidelity) {
      res.fidelity = fidelity();
      if (res.fidelity >= cfg.pretrain_fidelity) {
        res.reached_target = true;
        break;
      }
    }
  }
  if (!chase_fidelity) res.fidelity = fidelity();
  return res;
}

FeaturePanel net_feature_panel(const MlpNetwork& net, const WindowDataset& ds, int n_assets,
                               int n_days) {
  FeaturePanel fp;
  fp.values = Mat::Zero(n_assets, n_days);
  fp.valid = BoolGrid::Constant(n_assets, n_days, false);
  for (const DayCrossSection& dc : ds.days) {
    if (dc.assets.empty()) continue;
    const Vec y = mlp_forward(net, dc.inputs);
    for (std::size_t c = 0; c < dc.assets.size(); ++c) {
      fp.values(dc.assets[c], dc.day) = y[static_cast<Eigen::Index>(c)];
      fp.valid(dc.assets[c], dc.day) = true;
    }
  }
  return fp;
}

}  // namespace alphakit
