#pragma once

#include "alphakit/evaluation.hpp"

#include <filesystem>
#include <vector>

namespace alphakit {

/// `rank,rpn_string,train_ic,val_ic,test_ic`, ranks 1-based. Scheme A only.
void write_gp_features_csv(const EvalReport& report, const std::filesystem::path& path);

/// Parses the rpn_string column back into expressions, in rank order.
/// Throws std::runtime_error on a missing or malformed file.
std::vector<AlphaExpr> load_gp_features_csv(const std::filesystem::path& path);

/// `scheme,feature_id,train_ic,val_ic,test_ic,good_flag` rows for one scheme.
void write_scheme_rows_csv(const EvalReport& report, const std::filesystem::path& path);

/// Concatenates per-scheme row files (scheme order A, B, C) under one header.
void write_combined_scheme_report(const std::vector<std::filesystem::path>& row_files,
                                  const std::filesystem::path& path);

/// `metric,k,day,score,score_std`; one row per day, then an aggregate row
/// with day = "aggregate" carrying mean and population std.
void write_diversity_csv(const DiversityReport& report, const std::filesystem::path& path);

/// `period_start,portfolio_return,benchmark_return,cumulative`.
void write_backtest_csv(const BacktestResult& result, const std::filesystem::path& path);

/// `feature_id,epoch,input_index,field,lag,value`: the per-epoch contribution
/// trace of every trained network in a scheme run.
void write_contrib_trace_csv(const EvalReport& report,
                             const std::vector<TrainResult>& train_results, int window_len,
                             const std::filesystem::path& path);

/// Per-scheme aggregate line used to rebuild summary.txt across invocations.
struct SchemeAggregate {
  std::string scheme;
  int n_features = 0;
  double mean_test_ic = 0.0;
  double std_test_ic = 0.0;
  double diversity_mean = 0.0;
  double diversity_std = 0.0;
  std::string metric;
  int k = 0;
  int failures = 0;
  double wall_seconds = 0.0;  // the only non-deterministic output field

  static SchemeAggregate from_report(const EvalReport& report);
};

void write_aggregate_csv(const SchemeAggregate& agg, const std::filesystem::path& path);
SchemeAggregate load_aggregate_csv(const std::filesystem::path& path);

/// Three-column comparison (test IC, test diversity, time) over the schemes
/// present, one line per scheme.
void write_summary(const std::vector<SchemeAggregate>& aggregates,
                   const std::filesystem::path& path);

}  // namespace alphakit
