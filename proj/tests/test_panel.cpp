#include "alphakit/panel.hpp"
#include "alphakit/panel_io.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <filesystem>
#include <fstream>
#include <string>

using namespace alphakit;

namespace {

const std::string kSmallCsv =
    "date,asset_id,open,high,low,close,volume\n"
    "2020-01-01,AAA,10,11,9,10,1000\n"
    "2020-01-01,BBB,20,22,19,21,500\n"
    "2020-01-02,AAA,10,12,10,11,1100\n"
    "2020-01-03,AAA,11,12,10,12.1,900\n"
    "2020-01-03,BBB,21,23,20,22,450\n";

std::string slurp_error(const std::string& csv) {
  const auto path = testutil::write_temp("panel_err", csv);
  try {
    load_panel(path);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("panel") {

TEST_CASE("loader fills values and marks missing rows untradable") {
  const auto path = testutil::write_temp("panel_ok", kSmallCsv);
  const OhlcvPanel panel = load_panel(path);

  REQUIRE(panel.n_assets() == 2);
  REQUIRE(panel.n_days() == 3);
  CHECK(panel.assets[0] == "AAA");
  CHECK(panel.assets[1] == "BBB");
  CHECK(panel.days[1] == "2020-01-02");

  CHECK(panel.field(Field::close)(0, 2) == doctest::Approx(12.1));
  CHECK(panel.field(Field::volume)(1, 0) == doctest::Approx(500.0));
  CHECK(panel.tradable(0, 1));
  CHECK_FALSE(panel.tradable(1, 1));  // BBB missing on 2020-01-02
  CHECK(panel.tradable(1, 2));
}

TEST_CASE("loader rejects malformed input with line numbers") {
  CHECK(slurp_error("date,asset,open,high,low,close,volume\nx\n").find("header") !=
        std::string::npos);
  CHECK(slurp_error("date,asset_id,open,high,low,close,volume\n2020-01-01,AAA,1,1,1\n")
            .find("line 2") != std::string::npos);
  CHECK(slurp_error("date,asset_id,open,high,low,close,volume\n"
                    "2020-01-01,AAA,1,2,0.5,-1,10\n"
                    "2020-01-02,AAA,1,2,0.5,1,10\n")
            .find("line 2") != std::string::npos);
  CHECK(slurp_error("date,asset_id,open,high,low,close,volume\n"
                    "2020-01-01,AAA,1,2,0.5,1,10\n"
                    "2020-01-01,AAA,1,2,0.5,1,10\n"
                    "2020-01-02,AAA,1,2,0.5,1,10\n")
            .find("duplicate") != std::string::npos);
  CHECK(slurp_error("date,asset_id,open,high,low,close,volume\n"
                    "2020-01-01,AAA,1,2,0.5,1,10\n")
            .find("days") != std::string::npos);
  CHECK(slurp_error("date,asset_id,open,high,low,close,volume\n"
                    "2020-1-01,AAA,1,2,0.5,1,10\n"
                    "2020-01-02,AAA,1,2,0.5,1,10\n")
            .find("date") != std::string::npos);
}

TEST_CASE("panel csv round trip preserves values and holes") {
  const OhlcvPanel panel = testutil::make_random_panel(4, 6, 0.2, 99);
  const auto path =
      std::filesystem::temp_directory_path() / "alphakit_panel_roundtrip.csv";
  write_panel_csv(panel, path);
  const OhlcvPanel back = load_panel(path);

  REQUIRE(back.n_assets() == panel.n_assets());
  REQUIRE(back.n_days() == panel.n_days());
  for (int a = 0; a < panel.n_assets(); ++a) {
    for (int t = 0; t < panel.n_days(); ++t) {
      REQUIRE(back.tradable(a, t) == panel.tradable(a, t));
      if (!panel.tradable(a, t)) continue;
      for (int f = 0; f < kNumFields; ++f) {
        CHECK(back.values[f](a, t) == panel.values[f](a, t));
      }
    }
  }
}

TEST_CASE("forward returns use close prices h days ahead") {
  OhlcvPanel panel = testutil::make_random_panel(1, 5, 0.0, 3);
  auto& close = panel.values[static_cast<int>(Field::close)];
  close(0, 0) = 100.0;
  close(0, 1) = 110.0;
  close(0, 2) = 121.0;
  close(0, 3) = 133.1;
  close(0, 4) = 146.41;

  const ForwardReturns r1 = forward_return(panel, 1);
  CHECK(r1.values(0, 0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r1.values(0, 3) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r1.valid(0, 3));
  CHECK_FALSE(r1.valid(0, 4));  // no day 5

  const ForwardReturns r2 = forward_return(panel, 2);
  CHECK(r2.values(0, 0) == doctest::Approx(0.21).epsilon(1e-12));
  CHECK_FALSE(r2.valid(0, 3));
  CHECK_FALSE(r2.valid(0, 4));
}

TEST_CASE("forward returns require both endpoints tradable") {
  OhlcvPanel panel = testutil::make_random_panel(2, 6, 0.0, 4);
  panel.tradable(0, 3) = false;

  const ForwardReturns r = forward_return(panel, 2);
  CHECK_FALSE(r.valid(0, 1));  // lands on the hole
  CHECK_FALSE(r.valid(0, 3));  // starts on the hole
  CHECK(r.valid(0, 2));
  CHECK(r.valid(1, 1));

  CHECK_THROWS_AS(forward_return(panel, 0), std::invalid_argument);
  CHECK_THROWS_AS(forward_return(panel, 6), std::invalid_argument);
}

TEST_CASE("window_tradable answers range queries via prefix counts") {
  OhlcvPanel panel = testutil::make_random_panel(2, 8, 0.0, 5);
  panel.tradable(1, 4) = false;
  const auto prefix = panel.untradable_prefix();

  CHECK(window_tradable(prefix, 0, 0, 7));
  CHECK(window_tradable(prefix, 1, 0, 3));
  CHECK(window_tradable(prefix, 1, 5, 7));
  CHECK_FALSE(window_tradable(prefix, 1, 3, 5));
  CHECK_FALSE(window_tradable(prefix, 1, 4, 4));
}

TEST_CASE("feature csv round trip respects the validity mask") {
  const OhlcvPanel panel = testutil::make_random_panel(3, 4, 0.0, 8);
  FeaturePanel fp;
  fp.values = Mat::Zero(3, 4);
  fp.valid = BoolGrid::Constant(3, 4, false);
  fp.values(0, 1) = 1.25;
  fp.valid(0, 1) = true;
  fp.values(2, 3) = -0.5;
  fp.valid(2, 3) = true;

  const auto path =
      std::filesystem::temp_directory_path() / "alphakit_feature_roundtrip.csv";
  write_feature_csv(fp, panel, path);
  const FeaturePanel back = load_feature_csv(panel, path);

  for (int a = 0; a < 3; ++a) {
    for (int t = 0; t < 4; ++t) {
      REQUIRE(back.valid(a, t) == fp.valid(a, t));
      if (fp.valid(a, t)) CHECK(back.values(a, t) == fp.values(a, t));
    }
  }
}

TEST_CASE("feature csv loader rejects unknown assets and dates") {
  const OhlcvPanel panel = testutil::make_random_panel(2, 3, 0.0, 9);
  const auto bad_asset = testutil::write_temp(
      "feature_bad", "date,asset_id,value\n" + panel.days[0] + ",NOPE,1.0\n");
  CHECK_THROWS_AS(load_feature_csv(panel, bad_asset), std::runtime_error);

  const auto bad_date = testutil::write_temp(
      "feature_bad", "date,asset_id,value\n1999-01-01," + panel.assets[0] + ",1.0\n");
  CHECK_THROWS_AS(load_feature_csv(panel, bad_date), std::runtime_error);
}

}  // TEST_SUITE
