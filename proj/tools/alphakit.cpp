#include "alphakit/classical.hpp"
#include "alphakit/common.hpp"
#include "alphakit/config.hpp"
#include "alphakit/diversity.hpp"
#include "alphakit/evaluation.hpp"
#include "alphakit/panel_io.hpp"
#include "alphakit/report.hpp"
#include "alphakit/synthetic.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace ak = alphakit;
namespace fs = std::filesystem;

namespace {

struct LoadedData {
  ak::OhlcvPanel panel;
  ak::ForwardReturns returns;
  ak::WindowDataset ds;
  double oracle_ic = 0.0;
  bool synthetic = false;
};

LoadedData load_data(const ak::RunConfig& cfg) {
  LoadedData data;
  if (cfg.source == "synthetic") {
    ak::SynthResult synth = ak::generate_synthetic_panel(cfg.synth_config());
    data.panel = std::move(synth.panel);
    data.oracle_ic = synth.oracle_ic_mean;
    data.synthetic = true;
  } else {
    data.panel = ak::load_panel(cfg.path);
  }
  data.returns = ak::forward_return(data.panel, cfg.horizon);
  data.ds = ak::build_windows(data.panel, data.returns, cfg.window_len, cfg.splits,
                              cfg.min_cross_section);
  return data;
}

std::vector<ak::FeaturePanel> load_features(const ak::OhlcvPanel& panel,
                                            const std::vector<std::string>& paths) {
  std::vector<ak::FeaturePanel> features;
  features.reserve(paths.size());
  for (const std::string& path : paths) {
    features.push_back(ak::load_feature_csv(panel, path));
  }
  return features;
}

void regenerate_cross_run_reports(const fs::path& out_dir) {
  std::vector<fs::path> row_files;
  std::vector<ak::SchemeAggregate> aggregates;
  for (const char* scheme : {"A", "B", "C"}) {
    const fs::path rows = out_dir / (std::string("report_") + scheme + ".csv");
    if (fs::exists(rows)) row_files.push_back(rows);
    const fs::path agg = out_dir / (std::string("aggregate_") + scheme + ".csv");
    if (fs::exists(agg)) aggregates.push_back(ak::load_aggregate_csv(agg));
  }
  if (!row_files.empty()) {
    ak::write_combined_scheme_report(row_files, out_dir / "scheme_report.csv");
  }
  if (!aggregates.empty()) {
    ak::write_summary(aggregates, out_dir / "summary.txt");
  }
}

int cmd_synth(const ak::RunConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  ak::write_resolved_config(cfg, cfg.out_dir / "resolved_config.ini");
  const ak::SynthResult synth = ak::generate_synthetic_panel(cfg.synth_config());
  ak::write_panel_csv(synth.panel, cfg.out_dir / "panel.csv");
  ak::write_feature_csv(synth.oracle, synth.panel, cfg.out_dir / "oracle.csv");
  std::printf("panel: %d assets x %d days -> %s\n", synth.panel.n_assets(), synth.panel.n_days(),
              (cfg.out_dir / "panel.csv").c_str());
  std::printf("planted feature: %s, oracle mean IC = %.4f\n", cfg.planted_feature.c_str(),
              synth.oracle_ic_mean);
  return 0;
}

int cmd_run(const ak::RunConfig& cfg, const std::string& scheme_arg) {
  cfg.validate();
  const ak::Scheme scheme = ak::parse_scheme(scheme_arg);
  fs::create_directories(cfg.out_dir);
  ak::write_resolved_config(cfg, cfg.out_dir / "resolved_config.ini");
  const LoadedData data = load_data(cfg);

  std::vector<ak::AlphaExpr> teachers;
  if (scheme == ak::Scheme::B) {
    if (cfg.classical_teachers) {
      for (const std::string& name : ak::classical_feature_names()) {
        teachers.push_back(ak::classical_expr(name));
      }
    } else {
      const fs::path gp_csv = cfg.out_dir / "gp_features.csv";
      if (!fs::exists(gp_csv)) {
        throw ak::ConfigError("scheme B needs " + gp_csv.string() +
                              "; run `alphakit run A` with the same output directory first");
      }
      teachers = ak::load_gp_features_csv(gp_csv);
    }
  }

  const ak::SchemeOutcome outcome =
      ak::run_scheme(cfg.scheme_config(scheme), data.panel, data.returns, data.ds, teachers);
  const std::string tag = std::string(ak::scheme_name(scheme));

  if (scheme == ak::Scheme::A) {
    ak::write_gp_features_csv(outcome.report, cfg.out_dir / "gp_features.csv");
  } else {
    ak::write_contrib_trace_csv(outcome.report, outcome.train_results, cfg.window_len,
                                cfg.out_dir / ("contrib_trace_" + tag + ".csv"));
  }
  fs::create_directories(cfg.out_dir / "features" / tag);
  for (std::size_t i = 0; i < outcome.features.size(); ++i) {
    ak::write_feature_csv(outcome.features[i], data.panel,
                          cfg.out_dir / "features" / tag / (outcome.report.rows[i].id + ".csv"));
  }
  ak::write_scheme_rows_csv(outcome.report, cfg.out_dir / ("report_" + tag + ".csv"));
  if (outcome.report.diversity.k > 0) {
    ak::write_diversity_csv(outcome.report.diversity,
                            cfg.out_dir / ("diversity_" + tag + ".csv"));
  }
  ak::write_aggregate_csv(ak::SchemeAggregate::from_report(outcome.report),
                          cfg.out_dir / ("aggregate_" + tag + ".csv"));
  regenerate_cross_run_reports(cfg.out_dir);

  std::printf("scheme %s: %zu features, test IC %.4f +- %.4f", tag.c_str(),
              outcome.report.rows.size(), outcome.report.mean_test_ic,
              outcome.report.std_test_ic);
  if (outcome.report.diversity.k > 0) {
    std::printf(", diversity %.4f +- %.4f (%s, k=%d)", outcome.report.diversity.mean,
                outcome.report.diversity.stdev,
                std::string(ak::distance_metric_name(outcome.report.diversity.metric)).c_str(),
                outcome.report.diversity.k);
  }
  std::printf(", %.1fs", outcome.report.wall_seconds);
  if (outcome.report.failures > 0) std::printf(", %d failures", outcome.report.failures);
  std::printf("\n");
  if (data.synthetic) std::printf("oracle mean IC on this panel: %.4f\n", data.oracle_ic);
  return 0;
}

int cmd_eval(const ak::RunConfig& cfg, const std::vector<std::string>& feature_paths) {
  cfg.validate();
  const LoadedData data = load_data(cfg);
  fs::create_directories(cfg.out_dir);
  std::ofstream out(cfg.out_dir / "eval_report.csv");
  if (!out) throw std::runtime_error("cannot write eval_report.csv");
  out << "feature,split,mean_ic,std_ic,days\n";
  for (const std::string& path : feature_paths) {
    const ak::FeaturePanel feature = ak::load_feature_csv(data.panel, path);
    const std::string name = fs::path(path).stem().string();
    for (ak::Split split : {ak::Split::train, ak::Split::val, ak::Split::test}) {
      const ak::IcSeries ic =
          ak::feature_ic(feature, data.returns, ak::eligible_panel_days(data.ds, split));
      out << name << ',' << ak::split_name(split) << ',' << ak::format_double(ic.mean) << ','
          << ak::format_double(ic.stdev) << ',' << ic.values.size() << '\n';
      std::printf("%-24s %-6s IC %+.4f +- %.4f over %zu days\n", name.c_str(),
                  std::string(ak::split_name(split)).c_str(), ic.mean, ic.stdev,
                  ic.values.size());
    }
  }
  return 0;
}

int cmd_diversity(const ak::RunConfig& cfg, const std::vector<std::string>& feature_paths) {
  cfg.validate();
  if (feature_paths.size() < 2) throw ak::ConfigError("diversity needs at least 2 feature files");
  const LoadedData data = load_data(cfg);
  const std::vector<ak::FeaturePanel> features = load_features(data.panel, feature_paths);

  std::vector<int> days;
  for (int t : ak::split_panel_days(data.ds, ak::Split::test)) {
    int common = 0;
    for (int a = 0; a < data.panel.n_assets(); ++a) {
      bool ok = true;
      for (const ak::FeaturePanel& f : features) ok = ok && f.valid(a, t);
      if (ok) ++common;
    }
    if (common >= 2) days.push_back(t);
  }
  if (days.empty()) throw std::runtime_error("no test day covers all features");

  const int m = static_cast<int>(features.size());
  const int k =
      std::min(m, std::max(2, static_cast<int>(std::lround(cfg.k_fraction * m))));
  const ak::DiversityReport report =
      ak::diversity_score(features, days, cfg.diversity_metric, k,
                          ak::derive_seed(cfg.seed, "diversity"), cfg.raw_cross_entropy);
  fs::create_directories(cfg.out_dir);
  ak::write_diversity_csv(report, cfg.out_dir / "diversity_report.csv");
  std::printf("diversity (%s, k=%d) over %zu test days: %.4f +- %.4f\n",
              std::string(ak::distance_metric_name(report.metric)).c_str(), report.k,
              report.days.size(), report.mean, report.stdev);
  return 0;
}

int cmd_backtest(const ak::RunConfig& cfg, const std::vector<std::string>& feature_paths) {
  cfg.validate();
  const LoadedData data = load_data(cfg);
  const std::vector<ak::FeaturePanel> features = load_features(data.panel, feature_paths);
  const ak::BacktestResult result = ak::backtest_top_decile(
      features, data.panel, data.returns, ak::split_panel_days(data.ds, ak::Split::test));
  fs::create_directories(cfg.out_dir);
  ak::write_backtest_csv(result, cfg.out_dir / "backtest.csv");
  std::printf("backtest: %zu periods of %d days, portfolio %+.4f vs benchmark %+.4f\n",
              result.period_start.size(), result.holding_days, result.total_return,
              result.benchmark_total);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-sectional feature mining workbench"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  int workers_override = 1;
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--seed", seed_override, "override [run] seed");
  app.add_option("--workers", workers_override, "override [run] workers");
  app.add_option("--out", out_override, "override [output] directory");

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic planted-signal panel");
  CLI::App* run = app.add_subcommand("run", "run construction scheme A, B, or C");
  std::string scheme_arg;
  run->add_option("scheme", scheme_arg, "A (GP), B (nets on GP teachers), C (nets on noise)")
      ->required();
  CLI::App* eval = app.add_subcommand("eval", "score feature files by split IC");
  CLI::App* diversity = app.add_subcommand("diversity", "cluster-based diversity of feature files");
  CLI::App* backtest = app.add_subcommand("backtest", "long-top-decile backtest of feature files");
  std::vector<std::string> feature_paths;
  for (CLI::App* sub : {eval, diversity, backtest}) {
    sub->add_option("features", feature_paths, "feature CSV files")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    ak::RunConfig cfg;
    if (!config_path.empty()) cfg = ak::parse_config_file(config_path);
    if (app.count("--seed") > 0) cfg.seed = seed_override;
    if (app.count("--workers") > 0) cfg.workers = workers_override;
    if (!out_override.empty()) cfg.out_dir = out_override;

    if (synth->parsed()) return cmd_synth(cfg);
    if (run->parsed()) return cmd_run(cfg, scheme_arg);
    if (eval->parsed()) return cmd_eval(cfg, feature_paths);
    if (diversity->parsed()) return cmd_diversity(cfg, feature_paths);
    if (backtest->parsed()) return cmd_backtest(cfg, feature_paths);
    return 2;
  } catch (const ak::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
