#include "alphakit/expr.hpp"
#include "alphakit/expr_eval.hpp"

#include "alphakit/classical.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <cmath>
#include <string>

using namespace alphakit;

namespace {

bool close_rel(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

void check_panels_agree(const FeaturePanel& x, const FeaturePanel& y) {
  REQUIRE(x.values.rows() == y.values.rows());
  REQUIRE(x.values.cols() == y.values.cols());
  for (Eigen::Index a = 0; a < x.values.rows(); ++a) {
    for (Eigen::Index t = 0; t < x.values.cols(); ++t) {
      REQUIRE(x.valid(a, t) == y.valid(a, t));
      if (x.valid(a, t)) {
        REQUIRE_MESSAGE(close_rel(x.values(a, t), y.values(a, t)),
                        "cell (" << a << "," << t << "): " << x.values(a, t)
                                 << " vs " << y.values(a, t));
      }
    }
  }
}

int max_window_in(const ExprNode& node) {
  int w = node.window;
  for (const auto& c : node.children) w = std::max(w, max_window_in(*c));
  return w;
}

}  // namespace

TEST_SUITE("expr") {

TEST_CASE("parser reports arity underflow and leftovers") {
  CHECK_THROWS_WITH_AS(parse_rpn("add"), doctest::Contains("arity underflow"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_rpn("close neg add"), doctest::Contains("arity underflow"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_rpn("close close"), doctest::Contains("leftover"),
                       std::runtime_error);
  CHECK_THROWS_AS(parse_rpn(""), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_rpn("close bogus"), doctest::Contains("unknown token"),
                       std::runtime_error);
}

TEST_CASE("parser validates window suffixes") {
  CHECK_THROWS_AS(parse_rpn("close delay_0"), std::runtime_error);
  CHECK_THROWS_AS(parse_rpn("close ts_mean_31"), std::runtime_error);
  CHECK_THROWS_AS(parse_rpn("close delay_"), std::runtime_error);
  CHECK_THROWS_AS(parse_rpn("close delay"), std::runtime_error);
  CHECK_NOTHROW(parse_rpn("close ts_mean_30"));
  CHECK_NOTHROW(parse_rpn("close delay_1"));
}

TEST_CASE("serialization round-trips randomly grown trees") {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const AlphaExpr e = random_expr(rng, 6);
    const std::string text = to_rpn_string(e);
    const AlphaExpr back = parse_rpn(text);
    REQUIRE(structurally_equal(e, back));
    REQUIRE(to_rpn_string(back) == text);
  }
}

TEST_CASE("lookback accumulates through nested windows") {
  CHECK(parse_rpn("close").lookback() == 0);
  CHECK(parse_rpn("close delay_5").lookback() == 5);
  CHECK(parse_rpn("close ts_mean_5").lookback() == 4);
  CHECK(parse_rpn("close ts_mean_5 delay_3 delta_2").lookback() == 9);
  CHECK(parse_rpn("close delay_5 close ts_std_10 add").lookback() == 9);
  CHECK(parse_rpn("close cs_rank").lookback() == 0);
  CHECK(parse_rpn("close delay_3 cs_rank ts_max_4").lookback() == 6);
}

TEST_CASE("momentum matches a hand-computed oracle") {
  const OhlcvPanel panel = testutil::make_random_panel(3, 30, 0.0, 21);
  const Mat& close = panel.field(Field::close);
  const FeaturePanel fp = evaluate_panel(classical_expr("momentum_20"), panel);

  for (int a = 0; a < 3; ++a) {
    for (int t = 0; t < 30; ++t) {
      REQUIRE(fp.valid(a, t) == (t >= 20));
      if (t >= 20) {
        const double want = close(a, t) / close(a, t - 20) - 1.0;
        REQUIRE(close_rel(fp.values(a, t), want));
      }
    }
  }
}

TEST_CASE("time-series std matches a direct population formula") {
  const OhlcvPanel panel = testutil::make_random_panel(2, 20, 0.0, 22);
  const Mat& close = panel.field(Field::close);
  const FeaturePanel fp = evaluate_panel(parse_rpn("close ts_std_5"), panel);

  const int a = 1, t = 12;
  double mean = 0.0;
  for (int k = t - 4; k <= t; ++k) mean += close(a, k);
  mean /= 5.0;
  double var = 0.0;
  for (int k = t - 4; k <= t; ++k) var += (close(a, k) - mean) * (close(a, k) - mean);
  var /= 5.0;
  CHECK(close_rel(fp.values(a, t), std::sqrt(var)));
}

TEST_CASE("safe division yields zero near a vanishing denominator") {
  const OhlcvPanel panel = testutil::make_random_panel(2, 5, 0.0, 23);
  const FeaturePanel z = evaluate_panel(parse_rpn("close 0 safe_div"), panel);
  for (int a = 0; a < 2; ++a) {
    for (int t = 0; t < 5; ++t) CHECK(z.values(a, t) == 0.0);
  }
  const FeaturePanel tiny = evaluate_panel(parse_rpn("close 0.0000000000001 safe_div"), panel);
  CHECK(tiny.values(0, 0) == 0.0);
}

TEST_CASE("cross-sectional rank uses the subexpression's tradable universe") {
  OhlcvPanel panel = testutil::make_random_panel(4, 8, 0.0, 24);
  auto& close = panel.values[static_cast<int>(Field::close)];
  for (int a = 0; a < 4; ++a) {
    for (int t = 0; t < 8; ++t) close(a, t) = 10.0 * (a + 1) + t;
  }
  panel.tradable(2, 5) = false;

  const FeaturePanel r = evaluate_panel(parse_rpn("close cs_rank"), panel);
  // Day 4: all four assets, ascending closes by asset id.
  CHECK(r.values(0, 4) == 0.0);
  CHECK(r.values(1, 4) == doctest::Approx(1.0 / 3.0));
  CHECK(r.values(3, 4) == 1.0);
  // Day 5: asset 2 is out; remaining three rank 0, 1/2, 1.
  CHECK_FALSE(r.valid(2, 5));
  CHECK(r.values(0, 5) == 0.0);
  CHECK(r.values(1, 5) == 0.5);
  CHECK(r.values(3, 5) == 1.0);

  // With a delay_2 child the universe needs three tradable days, so the hole
  // at day 5 also removes asset 2 from the day-6 and day-7 universes.
  const FeaturePanel rd = evaluate_panel(parse_rpn("close delay_2 cs_rank"), panel);
  CHECK_FALSE(rd.valid(2, 6));
  CHECK(rd.values(0, 6) == 0.0);
  CHECK(rd.values(1, 6) == 0.5);
  CHECK(rd.values(3, 6) == 1.0);
  CHECK(rd.valid(2, 4));
}

TEST_CASE("constant expressions rank to one half") {
  const OhlcvPanel panel = testutil::make_random_panel(5, 4, 0.0, 25);
  const FeaturePanel r = evaluate_panel(parse_rpn("1 cs_rank"), panel);
  for (int a = 0; a < 5; ++a) {
    for (int t = 0; t < 4; ++t) CHECK(r.values(a, t) == 0.5);
  }
}

TEST_CASE("evaluation is total on random expressions") {
  const OhlcvPanel panel = testutil::make_random_panel(12, 60, 0.05, 26);
  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    const AlphaExpr e = random_expr(rng, 6);
    const FeaturePanel fp = evaluate_panel(e, panel);
    for (int a = 0; a < 12; ++a) {
      for (int t = 0; t < 60; ++t) {
        if (!fp.valid(a, t)) continue;
        REQUIRE(std::isfinite(fp.values(a, t)));
        REQUIRE(std::abs(fp.values(a, t)) <= 1e150);
      }
    }
  }
}

TEST_CASE("stack machine agrees with the scalar tree walker") {
  const OhlcvPanel holes = testutil::make_random_panel(10, 50, 0.08, 27);
  const OhlcvPanel dense = testutil::make_random_panel(8, 40, 0.0, 28);
  Rng rng(501);
  for (int i = 0; i < 500; ++i) {
    const AlphaExpr e = random_expr(rng, 6);
    const OhlcvPanel& panel = (i % 2 == 0) ? holes : dense;
    check_panels_agree(evaluate_panel(e, panel), evaluate_panel_tree(e, panel));
  }
}

TEST_CASE("single-day evaluation matches the panel and rejects short history") {
  const OhlcvPanel panel = testutil::make_random_panel(6, 30, 0.1, 29);
  const AlphaExpr e = parse_rpn("close ts_mean_5 high low sub safe_div cs_rank");
  const FeaturePanel fp = evaluate_panel(e, panel);

  const int day = 20;
  const CrossSection cs = evaluate(e, panel, day);
  CHECK(cs.day == day);
  REQUIRE(!cs.assets.empty());
  for (std::size_t i = 0; i < cs.assets.size(); ++i) {
    REQUIRE(fp.valid(cs.assets[i], day));
    REQUIRE(close_rel(cs.values[static_cast<Eigen::Index>(i)],
                      fp.values(cs.assets[i], day)));
  }
  CHECK_THROWS_AS(evaluate(e, panel, e.lookback() - 1), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(e, panel, 30), std::invalid_argument);
}

TEST_CASE("future perturbations never leak into past values") {
  Rng rng(909);
  for (int trial = 0; trial < 10; ++trial) {
    OhlcvPanel panel = testutil::make_random_panel(5, 40, 0.0, 30 + trial);
    const AlphaExpr e = random_expr(rng, 5);
    const FeaturePanel before = evaluate_panel(e, panel);

    const int cut = 25;
    for (auto& grid : panel.values) {
      for (int a = 0; a < 5; ++a) {
        for (int t = cut + 1; t < 40; ++t) grid(a, t) *= 1.7;
      }
    }
    const FeaturePanel after = evaluate_panel(e, panel);
    for (int a = 0; a < 5; ++a) {
      for (int t = 0; t <= cut; ++t) {
        REQUIRE(before.valid(a, t) == after.valid(a, t));
        if (before.valid(a, t)) REQUIRE(before.values(a, t) == after.values(a, t));
      }
    }
  }
}

TEST_CASE("random trees respect depth and window bounds and are seed-stable") {
  Rng rng_a(4242);
  Rng rng_b(4242);
  for (int i = 0; i < 500; ++i) {
    const AlphaExpr a = random_expr(rng_a, 6);
    const AlphaExpr b = random_expr(rng_b, 6);
    REQUIRE(a.depth() <= 6);
    REQUIRE(a.depth() >= 1);
    REQUIRE(max_window_in(a.root()) <= 20);
    REQUIRE(to_rpn_string(a) == to_rpn_string(b));
  }
}

TEST_CASE("classical features parse and stay within their stated lookbacks") {
  for (const auto& name : classical_feature_names()) {
    const AlphaExpr e = classical_expr(name);
    CHECK(!e.empty());
    CHECK(e.lookback() <= 20);
  }
  CHECK(classical_expr("momentum_5").lookback() == 5);
  CHECK(classical_expr("volatility_20").lookback() == 20);
  CHECK_THROWS_AS(classical_expr("nope"), std::invalid_argument);
}

}  // TEST_SUITE
