#pragma once

#include "alphakit/expr.hpp"

#include <string>
#include <vector>

namespace alphakit {

/// Names of the built-in hand-crafted features, in canonical order.
const std::vector<std::string>& classical_feature_names();

/// Postfix source text for a named feature. Throws std::invalid_argument on
/// unknown names, listing the valid ones.
const std::string& classical_feature_source(const std::string& name);

/// Parsed expression for a named feature.
AlphaExpr classical_expr(const std::string& name);

}  // namespace alphakit
