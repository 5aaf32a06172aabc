#include "alphakit/evaluation.hpp"

#include "alphakit/classical.hpp"
#include "alphakit/expr_eval.hpp"
#include "alphakit/synthetic.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace alphakit;

namespace {

struct SmallMarket {
  SynthResult synth;
  ForwardReturns returns;
  WindowDataset ds;
};

SmallMarket make_market(int n_assets = 25, int n_days = 110, std::uint64_t seed = 9) {
  SynthConfig cfg;
  cfg.n_assets = n_assets;
  cfg.n_days = n_days;
  cfg.seed = seed;
  cfg.signal_beta = 0.012;
  SmallMarket m;
  m.synth = generate_synthetic_panel(cfg);
  m.returns = forward_return(m.synth.panel, cfg.horizon);
  m.ds = build_windows(m.synth.panel, m.returns, 10, SplitSpec{50, 12, 12}, 10);
  return m;
}

SchemeConfig tiny_net_config(Scheme scheme, int n_features) {
  SchemeConfig cfg;
  cfg.scheme = scheme;
  cfg.n_features = n_features;
  cfg.seed = 123;
  cfg.train.hidden = {6, 3};
  cfg.train.batch_days = 4;
  cfg.train.batches_per_epoch = 3;
  cfg.train.max_epochs = 3;
  cfg.train.patience = 2;
  cfg.train.pretrain_epochs = 2;
  cfg.train.pretrain_epochs_random = 1;
  return cfg;
}

FeaturePanel returns_as_feature(const ForwardReturns& returns) {
  FeaturePanel f;
  f.values = returns.values;
  f.valid = returns.valid;
  return f;
}

/// Panel whose assets all share one price path, so every cross-section of
/// forward returns is constant.
OhlcvPanel uniform_panel(int n_assets, int n_days) {
  OhlcvPanel panel = testutil::make_random_panel(1, n_days, 0.0, 31);
  OhlcvPanel wide = testutil::make_random_panel(n_assets, n_days, 0.0, 31);
  for (auto& grid : wide.values) grid = Mat::Zero(n_assets, n_days);
  for (int a = 0; a < n_assets; ++a) {
    for (int t = 0; t < n_days; ++t) {
      for (int f = 0; f < 5; ++f) wide.values[f](a, t) = panel.values[f](0, t);
    }
  }
  wide.tradable.setConstant(true);
  return wide;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("split days are contiguous and eligible days are a subset") {
  const SmallMarket m = make_market();
  const auto train = split_panel_days(m.ds, Split::train);
  const auto val = split_panel_days(m.ds, Split::val);
  const auto test = split_panel_days(m.ds, Split::test);

  REQUIRE(train.size() == 50);
  REQUIRE(val.size() == 12);
  REQUIRE(test.size() == 12);
  CHECK(train.front() == m.ds.first_sample_day);
  CHECK(val.front() == train.back() + 1);
  CHECK(test.front() == val.back() + 1);

  for (Split s : {Split::train, Split::val, Split::test}) {
    const auto all = split_panel_days(m.ds, s);
    const auto eligible = eligible_panel_days(m.ds, s);
    CHECK(!eligible.empty());
    CHECK(std::is_sorted(eligible.begin(), eligible.end()));
    CHECK(std::includes(all.begin(), all.end(), eligible.begin(), eligible.end()));
  }
}

TEST_CASE("per-day IC of the stored oracle matches the generator trace") {
  const SmallMarket m = make_market();
  std::vector<int> days;
  for (int t = m.synth.first_feature_day; t < m.synth.panel.n_days() - m.returns.horizon; ++t) {
    days.push_back(t);
  }
  const IcSeries ic = feature_ic(m.synth.oracle, m.returns, days);

  REQUIRE(ic.values.size() == days.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < days.size(); ++i) {
    CHECK_FALSE(ic.degenerate[i]);
    CHECK(ic.values[i] == doctest::Approx(m.synth.oracle_ic_by_day[days[i]]).epsilon(1e-12));
    sum += ic.values[i];
  }
  CHECK(ic.mean == doctest::Approx(m.synth.oracle_ic_mean).epsilon(1e-12));
  CHECK(ic.mean == doctest::Approx(sum / static_cast<double>(days.size())).epsilon(1e-12));
}

TEST_CASE("a feature equal to forward returns has IC one on every day") {
  const SmallMarket m = make_market();
  const FeaturePanel f = returns_as_feature(m.returns);
  const IcSeries ic = feature_ic(f, m.returns, eligible_panel_days(m.ds, Split::train));
  REQUIRE(!ic.values.empty());
  for (double v : ic.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ic.mean == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant features are flagged degenerate and score zero") {
  const SmallMarket m = make_market();
  FeaturePanel f;
  f.values = Mat::Constant(m.synth.panel.n_assets(), m.synth.panel.n_days(), 3.5);
  f.valid = BoolGrid::Constant(m.synth.panel.n_assets(), m.synth.panel.n_days(), true);
  const IcSeries ic = feature_ic(f, m.returns, eligible_panel_days(m.ds, Split::val));
  for (std::size_t i = 0; i < ic.values.size(); ++i) {
    CHECK(ic.degenerate[i]);
    CHECK(ic.values[i] == 0.0);
  }
  CHECK(ic.mean == 0.0);
}

TEST_CASE("days below min_pairs score zero but stay in the denominator") {
  const SmallMarket m = make_market();
  FeaturePanel f = returns_as_feature(m.returns);
  const auto days = eligible_panel_days(m.ds, Split::train);
  REQUIRE(days.size() >= 2);
  const int gutted = days[1];
  for (int a = 1; a < m.synth.panel.n_assets(); ++a) f.valid(a, gutted) = false;

  const IcSeries ic = feature_ic(f, m.returns, days);
  const double n = static_cast<double>(days.size());
  CHECK(ic.degenerate[1]);
  CHECK(ic.values[1] == 0.0);
  CHECK(ic.mean == doctest::Approx((n - 1.0) / n).epsilon(1e-12));
}

TEST_CASE("GP fitness of the planted expression equals the oracle's split IC") {
  const SmallMarket m = make_market();
  const FitnessFn fitness = ic_fitness(m.synth.panel, m.returns, m.ds);

  const auto [train, val] = fitness(classical_expr("momentum_5"));
  const IcSeries train_ic =
      feature_ic(m.synth.oracle, m.returns, eligible_panel_days(m.ds, Split::train));
  const IcSeries val_ic =
      feature_ic(m.synth.oracle, m.returns, eligible_panel_days(m.ds, Split::val));
  CHECK(train == doctest::Approx(train_ic.mean).epsilon(1e-12));
  CHECK(val == doctest::Approx(val_ic.mean).epsilon(1e-12));

  const auto [ctrain, cval] = fitness(AlphaExpr(make_const(1.0)));
  CHECK(ctrain == 0.0);
  CHECK(cval == 0.0);
}

TEST_CASE("scheme names parse case-insensitively") {
  CHECK(parse_scheme("a") == Scheme::A);
  CHECK(parse_scheme("B") == Scheme::B);
  CHECK(parse_scheme("c") == Scheme::C);
  CHECK(scheme_name(Scheme::C) == "C");
  CHECK_THROWS_AS(parse_scheme("D"), ConfigError);
}

TEST_CASE("scheme config validation names the offending field") {
  SchemeConfig cfg = tiny_net_config(Scheme::C, 2);
  cfg.n_features = 0;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("n_features"), ConfigError);

  cfg = tiny_net_config(Scheme::C, 2);
  cfg.workers = 0;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("workers"), ConfigError);

  cfg = tiny_net_config(Scheme::C, 2);
  cfg.diversity_k_fraction = 0.0;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("k_fraction"), ConfigError);

  cfg = tiny_net_config(Scheme::A, 5);
  cfg.gp.top_m = 3;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("top_m"), ConfigError);
}

TEST_CASE("scheme A emits ranked expression features with consistent ICs") {
  const SmallMarket m = make_market();
  SchemeConfig cfg;
  cfg.scheme = Scheme::A;
  cfg.n_features = 3;
  cfg.seed = 5;
  cfg.gp.population = 40;
  cfg.gp.generations = 3;
  cfg.gp.top_m = 4;

  const SchemeOutcome out = run_scheme(cfg, m.synth.panel, m.returns, m.ds);
  REQUIRE(out.report.rows.size() == 3);
  REQUIRE(out.features.size() == 3);
  REQUIRE(out.gp_selected.size() == 3);
  CHECK(out.report.failures == 0);
  CHECK(out.train_results.empty());
  for (std::size_t i = 0; i < out.gp_selected.size(); ++i) {
    CHECK(out.gp_selected[i].rpn == out.report.rows[i].source);
  }

  CHECK(out.report.rows[0].id == "gp_000");
  CHECK(out.report.rows[2].id == "gp_002");

  double sum = 0.0;
  for (std::size_t i = 0; i < out.report.rows.size(); ++i) {
    const FeatureRow& row = out.report.rows[i];
    CHECK_NOTHROW(parse_rpn(row.source));
    const IcSeries test =
        feature_ic(out.features[i], m.returns, eligible_panel_days(m.ds, Split::test));
    CHECK(row.test_ic == doctest::Approx(test.mean).epsilon(1e-12));
    CHECK(row.good == (row.test_ic >= kGoodIcThreshold));
    sum += row.test_ic;
  }
  CHECK(out.report.mean_test_ic ==
        doctest::Approx(sum / static_cast<double>(out.report.rows.size())).epsilon(1e-12));
  CHECK(out.report.diversity.k == 2);
}

TEST_CASE("scheme B demands teacher expressions") {
  const SmallMarket m = make_market();
  const SchemeConfig cfg = tiny_net_config(Scheme::B, 2);
  CHECK_THROWS_WITH_AS(run_scheme(cfg, m.synth.panel, m.returns, m.ds),
                       doctest::Contains("scheme A"), ConfigError);
}

TEST_CASE("scheme C is deterministic and invariant to the worker count") {
  const SmallMarket m = make_market();
  SchemeConfig cfg = tiny_net_config(Scheme::C, 3);

  const SchemeOutcome first = run_scheme(cfg, m.synth.panel, m.returns, m.ds);
  const SchemeOutcome again = run_scheme(cfg, m.synth.panel, m.returns, m.ds);
  cfg.workers = 3;
  const SchemeOutcome parallel = run_scheme(cfg, m.synth.panel, m.returns, m.ds);

  REQUIRE(first.report.rows.size() == 3);
  CHECK(first.report.failures == 0);
  CHECK(first.report.rows[0].id == "net_000");
  CHECK(first.report.rows[0].source == "teacher=noise");
  REQUIRE(first.train_results.size() == 3);

  const auto same_feature = [](const FeaturePanel& x, const FeaturePanel& y) {
    if ((x.valid.array() != y.valid.array()).any()) return false;
    for (int a = 0; a < x.values.rows(); ++a) {
      for (int t = 0; t < x.values.cols(); ++t) {
        if (x.valid(a, t) && x.values(a, t) != y.values(a, t)) return false;
      }
    }
    return true;
  };
  for (const SchemeOutcome* other : {&again, &parallel}) {
    REQUIRE(other->report.rows.size() == first.report.rows.size());
    for (std::size_t i = 0; i < first.report.rows.size(); ++i) {
      CHECK(other->report.rows[i].id == first.report.rows[i].id);
      CHECK(other->report.rows[i].train_ic == first.report.rows[i].train_ic);
      CHECK(other->report.rows[i].val_ic == first.report.rows[i].val_ic);
      CHECK(other->report.rows[i].test_ic == first.report.rows[i].test_ic);
      CHECK(same_feature(other->features[i], first.features[i]));
    }
    CHECK(other->report.diversity.mean == first.report.diversity.mean);
  }
}

TEST_CASE("scheme B pretrains one network per teacher, round robin") {
  const SmallMarket m = make_market();
  const SchemeConfig cfg = tiny_net_config(Scheme::B, 3);
  std::vector<AlphaExpr> teachers;
  teachers.push_back(classical_expr("momentum_5"));
  teachers.push_back(classical_expr("reversal_5"));

  const SchemeOutcome out = run_scheme(cfg, m.synth.panel, m.returns, m.ds, teachers);
  REQUIRE(out.report.rows.size() == 3);
  CHECK(out.report.rows[0].source == "teacher=" + to_rpn_string(teachers[0]));
  CHECK(out.report.rows[1].source == "teacher=" + to_rpn_string(teachers[1]));
  CHECK(out.report.rows[2].source == "teacher=" + to_rpn_string(teachers[0]));
  CHECK(out.train_results.size() == 3);
}

TEST_CASE("perfect-foresight backtest matches a hand-chained oracle") {
  const SmallMarket m = make_market(25, 110, 11);
  const FeaturePanel foresight = returns_as_feature(m.returns);
  const auto days = split_panel_days(m.ds, Split::test);

  const BacktestResult result =
      backtest_top_decile({foresight}, m.synth.panel, m.returns, days);

  const int n = m.synth.panel.n_assets();
  const int top = (n + 9) / 10;
  double growth = 1.0;
  double bench_growth = 1.0;
  std::size_t period = 0;
  for (int t = days.front(); t <= days.back(); t += m.returns.horizon) {
    bool any_valid = false;
    for (int a = 0; a < n; ++a) any_valid = any_valid || m.returns.valid(a, t);
    if (!any_valid) break;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return m.returns.values(a, t) > m.returns.values(b, t);
    });
    double port = 0.0;
    double bench = 0.0;
    for (int i = 0; i < top; ++i) port += m.returns.values(order[i], t);
    for (int a = 0; a < n; ++a) bench += m.returns.values(a, t);
    port /= top;
    bench /= n;
    growth *= 1.0 + port;
    bench_growth *= 1.0 + bench;

    REQUIRE(period < result.period_start.size());
    CHECK(result.period_start[period] == t);
    CHECK(result.portfolio_return[period] == doctest::Approx(port).epsilon(1e-12));
    CHECK(result.benchmark_return[period] == doctest::Approx(bench).epsilon(1e-12));
    CHECK(result.portfolio_return[period] >= result.benchmark_return[period]);
    ++period;
  }
  CHECK(period == result.period_start.size());
  CHECK(result.total_return == doctest::Approx(growth - 1.0).epsilon(1e-12));
  CHECK(result.benchmark_total == doctest::Approx(bench_growth - 1.0).epsilon(1e-12));
  CHECK(result.cumulative.back() == result.total_return);
}

TEST_CASE("uniform cross-sections make the portfolio track the benchmark exactly") {
  const OhlcvPanel panel = uniform_panel(12, 60);
  const ForwardReturns returns = forward_return(panel, 5);
  FeaturePanel close_feature;
  close_feature.values = panel.field(Field::close);
  close_feature.valid = BoolGrid::Constant(12, 60, true);

  std::vector<int> days;
  for (int t = 20; t < 50; ++t) days.push_back(t);
  const BacktestResult result = backtest_top_decile({close_feature}, panel, returns, days);

  REQUIRE(!result.period_start.empty());
  for (std::size_t i = 0; i < result.period_start.size(); ++i) {
    CHECK(result.portfolio_return[i] == result.benchmark_return[i]);
  }
  CHECK(result.total_return == result.benchmark_total);
}

TEST_CASE("backtest refuses rebalance days with a thin universe") {
  SynthConfig cfg;
  cfg.n_assets = 8;
  cfg.n_days = 60;
  cfg.seed = 13;
  const SynthResult synth = generate_synthetic_panel(cfg);
  const ForwardReturns returns = forward_return(synth.panel, cfg.horizon);
  const FeaturePanel foresight = returns_as_feature(returns);
  std::vector<int> days;
  for (int t = 30; t < 45; ++t) days.push_back(t);
  CHECK_THROWS_WITH_AS(backtest_top_decile({foresight}, synth.panel, returns, days),
                       doctest::Contains(synth.panel.days[30].c_str()), std::runtime_error);
}

TEST_CASE("backtest periods step by the horizon and stop at the panel edge") {
  const SmallMarket m = make_market();
  const FeaturePanel foresight = returns_as_feature(m.returns);
  const auto days = split_panel_days(m.ds, Split::test);
  const BacktestResult result =
      backtest_top_decile({foresight}, m.synth.panel, m.returns, days);

  CHECK(result.holding_days == m.returns.horizon);
  for (std::size_t i = 1; i < result.period_start.size(); ++i) {
    CHECK(result.period_start[i] - result.period_start[i - 1] == m.returns.horizon);
  }
  CHECK(result.period_start.back() < m.synth.panel.n_days() - m.returns.horizon);
  REQUIRE(result.cumulative.size() == result.period_start.size());
}

}  // TEST_SUITE
