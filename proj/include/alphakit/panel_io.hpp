#pragma once

#include "alphakit/panel.hpp"

#include <filesystem>

namespace alphakit {

/// Loads a dense panel from `date,asset_id,open,high,low,close,volume` CSV.
/// Missing (date, asset) rows become untradable cells; assets and days are sorted.
/// Throws std::runtime_error with the offending line number on malformed input.
OhlcvPanel load_panel(const std::filesystem::path& path);

/// Writes the panel in the same CSV format, sorted by (date, asset_id).
/// Untradable cells are omitted (they reappear as holes on reload).
void write_panel_csv(const OhlcvPanel& panel, const std::filesystem::path& path);

/// Feature value CSV: `date,asset_id,value`, only valid cells, sorted by (date, asset_id).
void write_feature_csv(const FeaturePanel& feature, const OhlcvPanel& panel,
                       const std::filesystem::path& path);

/// Loads a feature CSV aligned to `panel`'s grid. Unknown dates or assets are an error.
FeaturePanel load_feature_csv(const OhlcvPanel& panel, const std::filesystem::path& path);

}  // namespace alphakit
