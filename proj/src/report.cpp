#include "alphakit/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace alphakit {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_gp_features_csv(const EvalReport& report, const std::filesystem::path& path) {
  if (report.scheme != Scheme::A) {
    throw std::invalid_argument("gp_features.csv comes from scheme A output");
  }
  std::ofstream out = open_out(path);
  out << "rank,rpn_string,train_ic,val_ic,test_ic\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const FeatureRow& row = report.rows[i];
    out << (i + 1) << ',' << row.source << ',' << format_double(row.train_ic) << ','
        << format_double(row.val_ic) << ',' << format_double(row.test_ic) << '\n';
  }
}

std::vector<AlphaExpr> load_gp_features_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || split_csv(line).size() != 5) {
    throw std::runtime_error(path.string() + ": expected header rank,rpn_string,...");
  }
  std::vector<AlphaExpr> exprs;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != 5) {
      throw std::runtime_error(path.string() + " line " + std::to_string(line_no) +
                               ": expected 5 cells");
    }
    exprs.push_back(parse_rpn(cells[1]));
  }
  if (exprs.empty()) throw std::runtime_error(path.string() + " holds no features");
  return exprs;
}

void write_scheme_rows_csv(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "scheme,feature_id,train_ic,val_ic,test_ic,good_flag\n";
  for (const FeatureRow& row : report.rows) {
    out << scheme_name(report.scheme) << ',' << row.id << ',' << format_double(row.train_ic)
        << ',' << format_double(row.val_ic) << ',' << format_double(row.test_ic) << ','
        << (row.good ? 1 : 0) << '\n';
  }
}

void write_combined_scheme_report(const std::vector<std::filesystem::path>& row_files,
                                  const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "scheme,feature_id,train_ic,val_ic,test_ic,good_flag\n";
  for (const std::filesystem::path& file : row_files) {
    std::ifstream in = open_in(file);
    std::string line;
    std::getline(in, line);  // skip the per-file header
    while (std::getline(in, line)) {
      if (!line.empty()) out << line << '\n';
    }
  }
}

void write_diversity_csv(const DiversityReport& report, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "metric,k,day,score,score_std\n";
  const std::string_view metric = distance_metric_name(report.metric);
  for (std::size_t i = 0; i < report.days.size(); ++i) {
    out << metric << ',' << report.k << ',' << report.days[i] << ','
        << format_double(report.day_score[i]) << ",\n";
  }
  out << metric << ',' << report.k << ",aggregate," << format_double(report.mean) << ','
      << format_double(report.stdev) << '\n';
}

void write_backtest_csv(const BacktestResult& result, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "period_start,portfolio_return,benchmark_return,cumulative\n";
  for (std::size_t i = 0; i < result.period_start.size(); ++i) {
    out << result.period_start[i] << ',' << format_double(result.portfolio_return[i]) << ','
        << format_double(result.benchmark_return[i]) << ','
        << format_double(result.cumulative[i]) << '\n';
  }
}

void write_contrib_trace_csv(const EvalReport& report,
                             const std::vector<TrainResult>& train_results, int window_len,
                             const std::filesystem::path& path) {
  if (report.rows.size() != train_results.size()) {
    throw std::invalid_argument("one train result per feature row expected");
  }
  std::ofstream out = open_out(path);
  out << "feature_id,epoch,input_index,field,lag,value\n";
  for (std::size_t r = 0; r < train_results.size(); ++r) {
    for (const EpochRecord& rec : train_results[r].history) {
      const Vec& c = rec.contrib.per_input;
      for (Eigen::Index j = 0; j < c.size(); ++j) {
        const int field = static_cast<int>(j) / window_len;
        const int lag = window_len - 1 - static_cast<int>(j) % window_len;
        out << report.rows[r].id << ',' << rec.epoch << ',' << j << ','
            << kFieldNames[static_cast<std::size_t>(field)] << ',' << lag << ','
            << format_double(c[j]) << '\n';
      }
    }
  }
}

SchemeAggregate SchemeAggregate::from_report(const EvalReport& report) {
  SchemeAggregate agg;
  agg.scheme = scheme_name(report.scheme);
  agg.n_features = static_cast<int>(report.rows.size());
  agg.mean_test_ic = report.mean_test_ic;
  agg.std_test_ic = report.std_test_ic;
  agg.diversity_mean = report.diversity.mean;
  agg.diversity_std = report.diversity.stdev;
  agg.metric = distance_metric_name(report.diversity.metric);
  agg.k = report.diversity.k;
  agg.failures = report.failures;
  agg.wall_seconds = report.wall_seconds;
  return agg;
}

void write_aggregate_csv(const SchemeAggregate& agg, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "scheme,n_features,mean_test_ic,std_test_ic,diversity_mean,diversity_std,metric,k,"
         "failures,wall_seconds\n";
  out << agg.scheme << ',' << agg.n_features << ',' << format_double(agg.mean_test_ic) << ','
      << format_double(agg.std_test_ic) << ',' << format_double(agg.diversity_mean) << ','
      << format_double(agg.diversity_std) << ',' << agg.metric << ',' << agg.k << ','
      << agg.failures << ',' << format_double(agg.wall_seconds) << '\n';
}

SchemeAggregate load_aggregate_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::getline(in, line);
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + " has no data row");
  const std::vector<std::string> cells = split_csv(line);
  if (cells.size() != 10) {
    throw std::runtime_error(path.string() + ": expected 10 cells, got " +
                             std::to_string(cells.size()));
  }
  SchemeAggregate agg;
  agg.scheme = cells[0];
  agg.n_features = std::stoi(cells[1]);
  agg.mean_test_ic = std::stod(cells[2]);
  agg.std_test_ic = std::stod(cells[3]);
  agg.diversity_mean = std::stod(cells[4]);
  agg.diversity_std = std::stod(cells[5]);
  agg.metric = cells[6];
  agg.k = std::stoi(cells[7]);
  agg.failures = std::stoi(cells[8]);
  agg.wall_seconds = std::stod(cells[9]);
  return agg;
}

void write_summary(const std::vector<SchemeAggregate>& aggregates,
                   const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "scheme comparison (per-feature test IC, test diversity, wall time)\n\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-8s %-10s %-22s %-28s %s\n", "Scheme", "Features",
                "Test IC", "Test Diversity", "Time");
  out << buf;
  for (const SchemeAggregate& agg : aggregates) {
    char ic[32], div[40], metric[48];
    std::snprintf(ic, sizeof(ic), "%.4f +- %.4f", agg.mean_test_ic, agg.std_test_ic);
    std::snprintf(div, sizeof(div), "%.4f +- %.4f", agg.diversity_mean, agg.diversity_std);
    std::snprintf(metric, sizeof(metric), "%s (%s, k=%d)", div, agg.metric.c_str(), agg.k);
    std::snprintf(buf, sizeof(buf), "%-8s %-10d %-22s %-28s %.1fs\n", agg.scheme.c_str(),
                  agg.n_features, ic, metric, agg.wall_seconds);
    out << buf;
    if (agg.failures > 0) {
      out << "  (" << agg.failures << " feature runs failed and were dropped)\n";
    }
  }
}

}  // namespace alphakit
