#pragma once

#include "alphakit/dataset.hpp"
#include "alphakit/evaluation.hpp"
#include "alphakit/synthetic.hpp"

#include <filesystem>
#include <string>

namespace alphakit {

/// Whole-run configuration, one field per config-file key. Every field has a
/// working default; a config file only overrides what it names.
struct RunConfig {
  // [run]
  std::uint64_t seed = 42;
  int workers = 1;

  // [data]
  std::string source = "synthetic";  // synthetic | csv
  std::string path;                  // csv source only
  int window_len = 30;
  int horizon = 5;
  SplitSpec splits;
  int min_cross_section = 20;
  int n_assets = 100;  // synthetic knobs
  int n_days = 340;
  std::string planted_feature = "momentum_5";
  double signal_beta = 0.013;
  double noise_sigma = 0.02;
  double base_vol = 0.01;
  double base_price = 1.0;
  double base_volume = 1.0;

  // [gp]
  GpConfig gp;

  // [adnn]
  TrainConfig train;

  // [diversity]
  DistanceMetric diversity_metric = DistanceMetric::cross_entropy;
  double k_fraction = 0.10;
  bool raw_cross_entropy = false;

  // [scheme]
  int n_features = 20;
  bool random_teacher_net = false;
  bool classical_teachers = false;

  // [output]
  std::filesystem::path out_dir = "out";

  /// Synthetic generator settings; the generator's seed and horizon follow
  /// the run seed and data horizon.
  SynthConfig synth_config() const;

  /// Scheme runner settings for one scheme.
  SchemeConfig scheme_config(Scheme scheme) const;

  void validate() const;  // throws ConfigError naming section.key
};

/// Parses `[section]` / `key = value` text ('#' and ';' comments). Unknown
/// sections or keys are errors naming the line. Throws ConfigError.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "config");
RunConfig parse_config_file(const std::filesystem::path& path);

/// Serializes every resolved field back to config syntax; reparsing the file
/// reproduces the same configuration.
std::string resolved_config_text(const RunConfig& cfg);
void write_resolved_config(const RunConfig& cfg, const std::filesystem::path& path);

}  // namespace alphakit
