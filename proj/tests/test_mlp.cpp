#include "alphakit/mlp.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

using namespace alphakit;

TEST_SUITE("mlp") {

TEST_CASE("a single linear layer is an affine map") {
  MlpNetwork net;
  net.sizes = {2, 1};
  Mat w(1, 2);
  w << 3.0, -2.0;
  net.weights = {w};
  net.biases = {Vec::Constant(1, 0.5)};

  Mat x(2, 3);
  x << 1.0, 0.0, 2.0,
       0.0, 1.0, -1.0;
  const Vec y = mlp_forward(net, x);
  CHECK(y[0] == doctest::Approx(3.5));
  CHECK(y[1] == doctest::Approx(-1.5));
  CHECK(y[2] == doctest::Approx(8.5));
}

TEST_CASE("hidden layers apply tanh, the output stays linear") {
  MlpNetwork net;
  net.sizes = {2, 2, 1};
  Mat w1(2, 2);
  w1 << 0.3, -0.4,
        0.7, 0.2;
  Mat w2(1, 2);
  w2 << 1.5, -0.5;
  net.weights = {w1, w2};
  Vec b1(2);
  b1 << 0.1, -0.2;
  net.biases = {b1, Vec::Constant(1, 0.25)};

  Vec x(2);
  x << 0.8, -1.1;
  const double h0 = std::tanh(0.3 * 0.8 - 0.4 * -1.1 + 0.1);
  const double h1 = std::tanh(0.7 * 0.8 + 0.2 * -1.1 - 0.2);
  const double want = 1.5 * h0 - 0.5 * h1 + 0.25;
  const Vec y = mlp_forward(net, x);
  CHECK(y[0] == doctest::Approx(want).epsilon(1e-14));

  ForwardCache cache;
  mlp_forward(net, x, &cache);
  REQUIRE(cache.acts.size() == 3);
  CHECK(cache.acts[1](0, 0) == doctest::Approx(h0).epsilon(1e-14));
  CHECK(std::abs(cache.acts[1](0, 0)) < 1.0);
}

TEST_CASE("glorot init respects fan-based bounds and is seed-stable") {
  Rng rng_a(42), rng_b(42);
  const MlpNetwork a = MlpNetwork::glorot({150, 64, 32, 1}, rng_a);
  const MlpNetwork b = MlpNetwork::glorot({150, 64, 32, 1}, rng_b);
  REQUIRE(a.n_layers() == 3);
  for (int l = 0; l < a.n_layers(); ++l) {
    const double limit =
        std::sqrt(6.0 / (a.sizes[static_cast<std::size_t>(l)] +
                         a.sizes[static_cast<std::size_t>(l) + 1]));
    CHECK(a.weights[static_cast<std::size_t>(l)].cwiseAbs().maxCoeff() <= limit);
    CHECK(a.weights[static_cast<std::size_t>(l)] == b.weights[static_cast<std::size_t>(l)]);
    CHECK(a.biases[static_cast<std::size_t>(l)].isZero());
  }
  CHECK(a.weights[0].cwiseAbs().maxCoeff() > 0.0);

  CHECK_THROWS_AS(MlpNetwork::glorot({5}, rng_a), std::invalid_argument);
  CHECK_THROWS_AS(MlpNetwork::glorot({5, 3, 2}, rng_a), std::invalid_argument);
  CHECK_THROWS_AS(MlpNetwork::glorot({5, 0, 1}, rng_a), std::invalid_argument);
}

TEST_CASE("checkpoints round-trip exactly and reject foreign files") {
  Rng rng(9);
  const MlpNetwork net = MlpNetwork::glorot({7, 4, 1}, rng);
  const auto path = std::filesystem::temp_directory_path() / "alphakit_net.bin";
  save_checkpoint(net, path);
  const MlpNetwork back = load_checkpoint(path);

  REQUIRE(back.sizes == net.sizes);
  for (int l = 0; l < net.n_layers(); ++l) {
    CHECK(back.weights[static_cast<std::size_t>(l)] == net.weights[static_cast<std::size_t>(l)]);
    CHECK(back.biases[static_cast<std::size_t>(l)] == net.biases[static_cast<std::size_t>(l)]);
  }

  const auto junk = std::filesystem::temp_directory_path() / "alphakit_junk.bin";
  {
    std::ofstream out(junk, std::ios::binary);
    out << "definitely not a checkpoint";
  }
  CHECK_THROWS_WITH_AS(load_checkpoint(junk), doctest::Contains("magic"), std::runtime_error);
  CHECK_THROWS_AS(load_checkpoint(junk.parent_path() / "missing.bin"), std::runtime_error);
}

TEST_CASE("contribution aggregates first-layer mass by field and lag") {
  // window_len 2, so input dim 10; coordinate f*2+k, lag = 1-k.
  MlpNetwork net;
  net.sizes = {10, 2, 1};
  Mat w1 = Mat::Zero(2, 10);
  w1(0, 0) = 1.0;   // open, oldest day (lag 1)
  w1(1, 0) = -2.0;
  w1(0, 7) = 4.0;   // close (field 3), newest day (lag 0)
  w1(1, 9) = -0.5;  // volume, newest day
  Mat w2 = Mat::Zero(1, 2);
  net.weights = {w1, w2};
  net.biases = {Vec::Zero(2), Vec::Zero(1)};

  const ContributionVector cv = contribution(net, 2);
  REQUIRE(cv.per_input.size() == 10);
  CHECK(cv.per_input[0] == 3.0);
  CHECK(cv.per_input[7] == 4.0);
  CHECK(cv.per_input[9] == 0.5);
  CHECK(cv.by_field[static_cast<int>(Field::open)] == 3.0);
  CHECK(cv.by_field[static_cast<int>(Field::close)] == 4.0);
  CHECK(cv.by_field[static_cast<int>(Field::volume)] == 0.5);
  CHECK(cv.by_field[static_cast<int>(Field::high)] == 0.0);
  CHECK(cv.by_lag[0] == 4.5);  // evaluation-day mass: close 4 + volume 0.5
  CHECK(cv.by_lag[1] == 3.0);

  CHECK_THROWS_AS(contribution(net, 3), std::invalid_argument);
}

TEST_CASE("finite() detects poisoned weights") {
  Rng rng(10);
  MlpNetwork net = MlpNetwork::glorot({3, 2, 1}, rng);
  CHECK(net.finite());
  net.weights[0](1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(net.finite());
}

}  // TEST_SUITE
