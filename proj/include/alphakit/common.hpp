#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace alphakit {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Arr = Eigen::ArrayXd;
using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Rng = std::mt19937_64;

enum class Field : int { open = 0, high = 1, low = 2, close = 3, volume = 4 };

inline constexpr int kNumFields = 5;
inline constexpr std::array<std::string_view, kNumFields> kFieldNames = {
    "open", "high", "low", "close", "volume"};

inline std::string_view field_name(Field f) { return kFieldNames[static_cast<int>(f)]; }

/// Bad configuration or usage; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Independent seed stream derived from a root seed and a stream index.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t stream = 0);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

}  // namespace alphakit
