#include "alphakit/evaluation.hpp"

#include "alphakit/expr_eval.hpp"
#include "alphakit/stats.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace alphakit {

namespace {

void finish_moments(IcSeries& series) {
  const auto n = static_cast<double>(series.values.size());
  if (n == 0) return;
  double mean = 0.0;
  for (double v : series.values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : series.values) var += (v - mean) * (v - mean);
  series.mean = mean;
  series.stdev = std::sqrt(var / n);
}

std::string padded_id(const char* prefix, int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%03d", prefix, i);
  return buf;
}

}  // namespace

std::vector<int> split_panel_days(const WindowDataset& ds, Split split) {
  const auto [begin, end] = ds.split_range(split);
  std::vector<int> days;
  days.reserve(static_cast<std::size_t>(end - begin));
  for (int i = begin; i < end; ++i) {
    days.push_back(ds.days[static_cast<std::size_t>(i)].day);
  }
  return days;
}

std::vector<int> eligible_panel_days(const WindowDataset& ds, Split split) {
  std::vector<int> days;
  for (int idx : ds.eligible_days(split)) {
    days.push_back(ds.days[static_cast<std::size_t>(idx)].day);
  }
  return days;
}

IcSeries feature_ic(const FeaturePanel& feature, const ForwardReturns& returns,
                    const std::vector<int>& days, int min_pairs) {
  IcSeries series;
  series.days = days;
  series.values.reserve(days.size());
  series.degenerate.reserve(days.size());
  std::vector<double> xs, ys;
  for (int t : days) {
    xs.clear();
    ys.clear();
    for (int a = 0; a < feature.values.rows(); ++a) {
      if (feature.valid(a, t) && returns.valid(a, t)) {
        xs.push_back(feature.values(a, t));
        ys.push_back(returns.values(a, t));
      }
    }
    if (static_cast<int>(xs.size()) < std::max(min_pairs, 2)) {
      series.values.push_back(0.0);
      series.degenerate.push_back(1);
      continue;
    }
    const Vec x = Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    const Vec y = Eigen::Map<const Vec>(ys.data(), static_cast<Eigen::Index>(ys.size()));
    const CorrValue corr = spearman(x, y);
    series.values.push_back(corr.degenerate ? 0.0 : corr.value);
    series.degenerate.push_back(corr.degenerate ? 1 : 0);
  }
  finish_moments(series);
  return series;
}

FitnessFn ic_fitness(const OhlcvPanel& panel, const ForwardReturns& returns,
                     const WindowDataset& ds) {
  return [&panel, &returns, &ds](const AlphaExpr& expr) {
    const FeaturePanel feature = evaluate_panel(expr, panel);
    const double train =
        feature_ic(feature, returns, eligible_panel_days(ds, Split::train)).mean;
    const double val = feature_ic(feature, returns, eligible_panel_days(ds, Split::val)).mean;
    return std::make_pair(train, val);
  };
}

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::A: return "A";
    case Scheme::B: return "B";
    case Scheme::C: return "C";
  }
  throw std::logic_error("unhandled scheme");
}

Scheme parse_scheme(const std::string& name) {
  if (name == "A" || name == "a") return Scheme::A;
  if (name == "B" || name == "b") return Scheme::B;
  if (name == "C" || name == "c") return Scheme::C;
  throw ConfigError("unknown scheme '" + name + "' (expected A, B, or C)");
}

void SchemeConfig::validate() const {
  if (n_features < 1) throw ConfigError("n_features must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (diversity_k_fraction <= 0.0 || diversity_k_fraction > 1.0) {
    throw ConfigError("diversity_k_fraction must be in (0, 1]");
  }
  if (scheme == Scheme::A && gp.top_m < n_features) {
    throw ConfigError("gp top_m (" + std::to_string(gp.top_m) + ") smaller than n_features (" +
                      std::to_string(n_features) + ")");
  }
  gp.validate();
  train.validate();
}

namespace {

struct FeatureTask {
  FeatureRow row;
  FeaturePanel feature;
  TrainResult training;
  bool failed = false;
  std::string error;
};

/// Teacher panel of i.i.d. standard-normal values over the whole grid.
FeaturePanel noise_teacher(int n_assets, int n_days, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  FeaturePanel teacher;
  teacher.values.resize(n_assets, n_days);
  for (int a = 0; a < n_assets; ++a) {
    for (int t = 0; t < n_days; ++t) teacher.values(a, t) = normal(rng);
  }
  teacher.valid = BoolGrid::Constant(n_assets, n_days, true);
  return teacher;
}

std::vector<int> diversity_usable_days(const std::vector<FeaturePanel>& features,
                                       const std::vector<int>& days) {
  std::vector<int> usable;
  for (int t : days) {
    int common = 0;
    for (int a = 0; a < features.front().values.rows(); ++a) {
      bool ok = true;
      for (const FeaturePanel& f : features) {
        if (!f.valid(a, t)) {
          ok = false;
          break;
        }
      }
      if (ok) ++common;
    }
    if (common >= 2) usable.push_back(t);
  }
  return usable;
}

}  // namespace

SchemeOutcome run_scheme(const SchemeConfig& cfg, const OhlcvPanel& panel,
                         const ForwardReturns& returns, const WindowDataset& ds,
                         const std::vector<AlphaExpr>& teachers) {
  cfg.validate();
  if (cfg.scheme == Scheme::B && teachers.empty()) {
    throw ConfigError("scheme B needs teacher expressions (run scheme A first)");
  }
  const auto started = std::chrono::steady_clock::now();

  SchemeOutcome out;
  out.report.scheme = cfg.scheme;
  const std::vector<int> train_days = eligible_panel_days(ds, Split::train);
  const std::vector<int> val_days = eligible_panel_days(ds, Split::val);
  const std::vector<int> test_days = eligible_panel_days(ds, Split::test);

  auto fill_ics = [&](FeatureRow& row, const FeaturePanel& feature) {
    row.train_ic = feature_ic(feature, returns, train_days).mean;
    row.val_ic = feature_ic(feature, returns, val_days).mean;
    row.test_ic = feature_ic(feature, returns, test_days).mean;
    row.good = row.test_ic >= kGoodIcThreshold;
  };

  if (cfg.scheme == Scheme::A) {
    Rng gp_rng(derive_seed(cfg.seed, "gp"));
    GpResult gp = run_gp(cfg.gp, ic_fitness(panel, returns, ds), gp_rng);
    for (int i = 0; i < cfg.n_features; ++i) {
      GpIndividual& ind = gp.selected[static_cast<std::size_t>(i)];
      FeatureRow row;
      row.id = padded_id("gp_", i);
      row.source = ind.rpn;
      FeaturePanel feature = evaluate_panel(ind.expr, panel);
      fill_ics(row, feature);
      out.report.rows.push_back(std::move(row));
      out.features.push_back(std::move(feature));
      out.gp_selected.push_back(std::move(ind));
    }
  } else {
    const int n_assets = panel.n_assets();
    const int n_days = panel.n_days();
    std::vector<FeatureTask> tasks(static_cast<std::size_t>(cfg.n_features));
    std::vector<FeaturePanel> teacher_panels;
    if (cfg.scheme == Scheme::B) {
      teacher_panels.reserve(teachers.size());
      for (const AlphaExpr& teacher : teachers) {
        teacher_panels.push_back(evaluate_panel(teacher, panel));
      }
    }

    auto run_one = [&](int i) {
      FeatureTask& task = tasks[static_cast<std::size_t>(i)];
      try {
        Rng teacher_rng(derive_seed(cfg.seed, "teacher", static_cast<std::uint64_t>(i)));
        Rng net_rng(derive_seed(cfg.seed, "net", static_cast<std::uint64_t>(i)));

        const FeaturePanel* teacher = nullptr;
        FeaturePanel local_teacher;
        bool chase_fidelity = true;
        if (cfg.scheme == Scheme::B) {
          const std::size_t t = static_cast<std::size_t>(i) % teacher_panels.size();
          teacher = &teacher_panels[t];
          task.row.source = "teacher=" + to_rpn_string(teachers[t]);
        } else if (cfg.random_teacher_net) {
          std::vector<int> sizes = {ds.input_dim};
          sizes.insert(sizes.end(), cfg.train.hidden.begin(), cfg.train.hidden.end());
          sizes.push_back(1);
          const MlpNetwork random_net = MlpNetwork::glorot(sizes, teacher_rng);
          local_teacher = net_feature_panel(random_net, ds, n_assets, n_days);
          teacher = &local_teacher;
          task.row.source = "teacher=random_net";
          chase_fidelity = false;
        } else {
          local_teacher = noise_teacher(n_assets, n_days, teacher_rng);
          teacher = &local_teacher;
          task.row.source = "teacher=noise";
          chase_fidelity = false;
        }

        std::vector<int> sizes = {ds.input_dim};
        sizes.insert(sizes.end(), cfg.train.hidden.begin(), cfg.train.hidden.end());
        sizes.push_back(1);
        MlpNetwork net = MlpNetwork::glorot(sizes, net_rng);
        pretrain(net, *teacher, ds, cfg.train, net_rng, chase_fidelity);
        task.training = train(net, ds, cfg.train, net_rng);
        task.feature = net_feature_panel(net, ds, n_assets, n_days);
        task.row.id = padded_id("net_", i);
        fill_ics(task.row, task.feature);
      } catch (const std::exception& e) {
        task.failed = true;
        task.error = e.what();
      }
    };

    if (cfg.workers <= 1 || cfg.n_features == 1) {
      for (int i = 0; i < cfg.n_features; ++i) run_one(i);
    } else {
      std::atomic<int> next{0};
      auto worker = [&] {
        for (int i = next.fetch_add(1); i < cfg.n_features; i = next.fetch_add(1)) run_one(i);
      };
      std::vector<std::thread> pool;
      const int n_workers = std::min(cfg.workers, cfg.n_features);
      pool.reserve(static_cast<std::size_t>(n_workers));
      for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
      for (std::thread& t : pool) t.join();
    }

    for (FeatureTask& task : tasks) {
      if (task.failed) {
        ++out.report.failures;
        continue;
      }
      out.report.rows.push_back(std::move(task.row));
      out.features.push_back(std::move(task.feature));
      out.train_results.push_back(std::move(task.training));
    }
  }

  if (!out.report.rows.empty()) {
    double mean = 0.0;
    for (const FeatureRow& row : out.report.rows) mean += row.test_ic;
    mean /= static_cast<double>(out.report.rows.size());
    double var = 0.0;
    for (const FeatureRow& row : out.report.rows) {
      var += (row.test_ic - mean) * (row.test_ic - mean);
    }
    out.report.mean_test_ic = mean;
    out.report.std_test_ic = std::sqrt(var / static_cast<double>(out.report.rows.size()));
  }

  if (out.features.size() >= 2) {
    const std::vector<int> usable = diversity_usable_days(out.features, test_days);
    if (!usable.empty()) {
      const int m = static_cast<int>(out.features.size());
      const int k =
          std::min(m, std::max(2, static_cast<int>(std::lround(cfg.diversity_k_fraction * m))));
      out.report.diversity = diversity_score(out.features, usable, cfg.diversity_metric, k,
                                             derive_seed(cfg.seed, "diversity"));
    }
  }

  out.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

BacktestResult backtest_top_decile(const std::vector<FeaturePanel>& features,
                                   const OhlcvPanel& panel, const ForwardReturns& returns,
                                   const std::vector<int>& days) {
  if (features.empty()) throw std::invalid_argument("backtest needs at least one feature");
  if (days.empty()) throw std::invalid_argument("backtest needs at least one day");

  BacktestResult result;
  result.holding_days = returns.horizon;
  double growth = 1.0;
  double bench_growth = 1.0;

  for (std::size_t i = 0; i < days.size(); i += static_cast<std::size_t>(returns.horizon)) {
    const int t = days[i];
    bool realizable = false;
    for (int a = 0; a < panel.n_assets() && !realizable; ++a) {
      realizable = returns.valid(a, t);
    }
    if (!realizable) break;  // the holding period would run past the panel

    std::vector<int> universe;
    for (int a = 0; a < panel.n_assets(); ++a) {
      if (!panel.tradable(a, t) || !returns.valid(a, t)) continue;
      bool covered = true;
      for (const FeaturePanel& f : features) {
        if (!f.valid(a, t)) {
          covered = false;
          break;
        }
      }
      if (covered) universe.push_back(a);
    }
    if (static_cast<int>(universe.size()) < 10) {
      throw std::runtime_error("rebalance day " + panel.days[static_cast<std::size_t>(t)] +
                               " has " + std::to_string(universe.size()) +
                               " tradable assets with features and returns; need at least 10");
    }

    const auto n = static_cast<Eigen::Index>(universe.size());
    Vec composite = Vec::Zero(n);
    Vec vals(n);
    for (const FeaturePanel& f : features) {
      for (Eigen::Index u = 0; u < n; ++u) {
        vals[u] = f.values(universe[static_cast<std::size_t>(u)], t);
      }
      composite += rank01(vals);
    }
    composite /= static_cast<double>(features.size());

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return composite[a] > composite[b];
    });
    const auto decile = static_cast<std::size_t>((universe.size() + 9) / 10);

    double long_ret = 0.0;
    for (std::size_t d = 0; d < decile; ++d) {
      long_ret += returns.values(universe[static_cast<std::size_t>(order[d])], t);
    }
    long_ret /= static_cast<double>(decile);
    double bench = 0.0;
    for (int a : universe) bench += returns.values(a, t);
    bench /= static_cast<double>(universe.size());

    growth *= 1.0 + long_ret;
    bench_growth *= 1.0 + bench;
    result.period_start.push_back(t);
    result.portfolio_return.push_back(long_ret);
    result.benchmark_return.push_back(bench);
    result.cumulative.push_back(growth - 1.0);
    result.benchmark_cumulative.push_back(bench_growth - 1.0);
  }

  result.total_return = growth - 1.0;
  result.benchmark_total = bench_growth - 1.0;
  return result;
}

}  // namespace alphakit
