#pragma once

#include "alphakit/expr.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace alphakit {

struct GpConfig {
  int population = 200;
  int generations = 30;
  int tournament = 5;
  double p_crossover = 0.7;
  double p_subtree_mutation = 0.2;
  double p_point_mutation = 0.1;  // remainder is plain reproduction
  int max_depth = 6;
  int elitism = 5;
  int top_m = 100;  // features kept at the end, ranked by validation fitness

  void validate() const;  // throws ConfigError naming the field
};

/// Computes (train_fitness, val_fitness) for an expression. Called once per
/// distinct serialized expression; results are cached by the archive.
using FitnessFn = std::function<std::pair<double, double>(const AlphaExpr&)>;

struct GpIndividual {
  AlphaExpr expr;
  std::string rpn;
  double train_fitness = 0.0;
  double val_fitness = 0.0;
};

struct GpResult {
  std::vector<GpIndividual> selected;      // top_m by validation fitness
  std::vector<double> best_train_by_gen;   // population best per generation
  int distinct_evaluated = 0;
};

/// Subtree crossover: a random subtree of `donor` replaces a random subtree
/// of `base`; overdeep internal nodes are cut back to random terminals.
AlphaExpr gp_crossover(const AlphaExpr& base, const AlphaExpr& donor, int max_depth, Rng& rng);

/// Replaces a random subtree with a freshly grown one fitting the depth cap.
AlphaExpr gp_subtree_mutation(const AlphaExpr& base, int max_depth, Rng& rng);

/// Swaps one node for an arity-compatible alternative; terminals stay
/// terminals, windowed ops keep their window when the replacement also
/// takes one.
AlphaExpr gp_point_mutation(const AlphaExpr& base, Rng& rng);

/// Tournament-selection GP over the expression space. Fitness values are
/// cached per distinct expression across the whole run; the final selection
/// ranks the distinct expressions surviving in the last population by
/// validation fitness (ties broken by serialized form). Throws
/// std::runtime_error if fewer than top_m distinct expressions survive.
GpResult run_gp(const GpConfig& cfg, const FitnessFn& fitness, Rng& rng);

}  // namespace alphakit
