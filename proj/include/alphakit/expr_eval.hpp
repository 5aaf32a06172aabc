#pragma once

#include "alphakit/expr.hpp"
#include "alphakit/panel.hpp"

#include <vector>

namespace alphakit {

/// One day's feature values over the assets tradable across the expression's
/// full lookback window ending at that day.
struct CrossSection {
  int day = -1;
  std::vector<int> assets;  // ascending asset indices
  Vec values;               // aligned with assets
};

/// Evaluates an expression over the whole panel with a vectorized stack
/// machine. Cell (a, t) is valid when t covers the expression lookback and
/// the asset is tradable on every day of that window; invalid cells are 0.
FeaturePanel evaluate_panel(const AlphaExpr& expr, const OhlcvPanel& panel);

/// Reference evaluator: recursive scalar tree walk sharing no evaluation code
/// with the stack machine. Produces the same validity mask and, on valid
/// cells, the same values.
FeaturePanel evaluate_panel_tree(const AlphaExpr& expr, const OhlcvPanel& panel);

/// Single-day evaluation via the tree walker. Throws std::invalid_argument
/// when the day cannot cover the expression lookback.
CrossSection evaluate(const AlphaExpr& expr, const OhlcvPanel& panel, int day);

}  // namespace alphakit
