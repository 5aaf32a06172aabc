#pragma once

#include "alphakit/dataset.hpp"
#include "alphakit/diversity.hpp"
#include "alphakit/expr.hpp"
#include "alphakit/gp.hpp"
#include "alphakit/panel.hpp"
#include "alphakit/trainer.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace alphakit {

/// Panel day indices belonging to a dataset split, ascending.
std::vector<int> split_panel_days(const WindowDataset& ds, Split split);

/// Panel day indices of a split's batch-eligible days (enough valid pairs).
/// Scheme reports and GP fitness average over these, matching the trainer's
/// validation convention.
std::vector<int> eligible_panel_days(const WindowDataset& ds, Split split);

struct IcSeries {
  std::vector<int> days;        // panel day indices
  std::vector<double> values;   // flagged days recorded as 0
  std::vector<char> degenerate; // constant side or too few valid pairs
  double mean = 0.0;            // over all days, flagged ones included as 0
  double stdev = 0.0;           // population
};

/// Per-day exact rank IC of a feature against forward returns over the given
/// panel days, using cells valid on both sides. Days with fewer than
/// `min_pairs` valid pairs or a constant side score 0 and are flagged; the
/// aggregate divides by the full day count either way.
IcSeries feature_ic(const FeaturePanel& feature, const ForwardReturns& returns,
                    const std::vector<int>& days, int min_pairs = 2);

/// GP objective: (train mean IC, validation mean IC) of the expression's
/// panel values. The returned callable holds references; the arguments must
/// outlive it.
FitnessFn ic_fitness(const OhlcvPanel& panel, const ForwardReturns& returns,
                     const WindowDataset& ds);

enum class Scheme : int { A = 0, B, C };

std::string_view scheme_name(Scheme s);
/// Accepts "A", "B", "C" (case-insensitive). Throws ConfigError otherwise.
Scheme parse_scheme(const std::string& name);

inline constexpr double kGoodIcThreshold = 0.05;

struct SchemeConfig {
  Scheme scheme = Scheme::A;
  int n_features = 20;
  std::uint64_t seed = 42;
  int workers = 1;
  bool random_teacher_net = false;  // scheme C: pretrain toward a random net, not noise values
  DistanceMetric diversity_metric = DistanceMetric::cross_entropy;
  double diversity_k_fraction = 0.10;  // k = max(2, round(fraction * m)), capped at m
  GpConfig gp;
  TrainConfig train;

  void validate() const;  // throws ConfigError naming the field
};

struct FeatureRow {
  std::string id;      // gp_000... or net_000...
  std::string source;  // expression text, or the network's teacher
  double train_ic = 0.0;
  double val_ic = 0.0;
  double test_ic = 0.0;
  bool good = false;  // test_ic >= kGoodIcThreshold
};

struct EvalReport {
  Scheme scheme = Scheme::A;
  std::vector<FeatureRow> rows;
  double mean_test_ic = 0.0;
  double std_test_ic = 0.0;  // population, across features
  DiversityReport diversity; // test days; left default when fewer than 2 features
  double wall_seconds = 0.0;
  int failures = 0;
};

struct SchemeOutcome {
  EvalReport report;
  std::vector<FeaturePanel> features;      // aligned with report.rows
  std::vector<GpIndividual> gp_selected;   // scheme A only
  std::vector<TrainResult> train_results;  // schemes B and C, aligned with rows
};

/// Runs one construction scheme end to end:
///   A: genetic programming, keeping the n_features best-by-validation
///      expressions;
///   B: one network per feature, pretrained on GP teacher expressions
///      assigned round-robin (pass them in `teachers`), then surrogate-trained;
///   C: like B with random teachers (noise values, or a random network when
///      cfg.random_teacher_net is set).
/// Per-feature work derives its own seed stream from (cfg.seed, index), so
/// any worker count produces identical results. A feature whose training
/// throws is dropped and counted in report.failures.
SchemeOutcome run_scheme(const SchemeConfig& cfg, const OhlcvPanel& panel,
                         const ForwardReturns& returns, const WindowDataset& ds,
                         const std::vector<AlphaExpr>& teachers = {});

struct BacktestResult {
  int holding_days = 5;
  std::vector<int> period_start;          // panel day index of each rebalance
  std::vector<double> portfolio_return;   // per holding period
  std::vector<double> benchmark_return;   // equal-weight universe, same period
  std::vector<double> cumulative;         // compounded portfolio return so far
  std::vector<double> benchmark_cumulative;
  double total_return = 0.0;
  double benchmark_total = 0.0;
};

/// Long-only decile backtest over `days` (ascending panel day indices,
/// normally a split). Composite score = equal-weight mean of each feature's
/// per-day rank in [0,1]. Every `returns.horizon` days the top ceil(n/10)
/// assets by composite (ties broken by asset order) are held equal-weighted;
/// period returns chain multiplicatively. A rebalance day needs 10 tradable
/// assets with valid forward returns and feature values, else
/// std::runtime_error. Periods whose returns cannot realize inside the panel
/// are not opened.
BacktestResult backtest_top_decile(const std::vector<FeaturePanel>& features,
                                   const OhlcvPanel& panel, const ForwardReturns& returns,
                                   const std::vector<int>& days);

}  // namespace alphakit
