#include "alphakit/panel_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace alphakit {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const char* what, int line_no) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad " + what + " value '" + s +
                             "'");
  }
  return v;
}

bool iso_date_ok(const std::string& d) {
  if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (d[i] < '0' || d[i] > '9') return false;
  }
  return true;
}

}  // namespace

OhlcvPanel load_panel(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open panel file: " + path.string());

  struct Row {
    int line_no;
    std::array<double, kNumFields> v;
  };
  std::map<std::pair<std::string, std::string>, Row> rows;  // (date, asset) -> row
  std::set<std::string> dates;
  std::set<std::string> asset_ids;

  std::string line;
  int line_no = 0;
  if (!std::getline(file, line)) throw std::runtime_error("empty panel file: " + path.string());
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "date,asset_id,open,high,low,close,volume")
    throw std::runtime_error("line 1: expected header 'date,asset_id,open,high,low,close,volume'");

  while (std::getline(file, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 7)
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 7 columns, got " +
                               std::to_string(cells.size()));
    const std::string& date = cells[0];
    const std::string& asset = cells[1];
    if (!iso_date_ok(date))
      throw std::runtime_error("line " + std::to_string(line_no) + ": bad ISO-8601 date '" + date +
                               "'");
    if (asset.empty())
      throw std::runtime_error("line " + std::to_string(line_no) + ": empty asset_id");
    Row row;
    row.line_no = line_no;
    row.v[0] = parse_number(cells[2], "open", line_no);
    row.v[1] = parse_number(cells[3], "high", line_no);
    row.v[2] = parse_number(cells[4], "low", line_no);
    row.v[3] = parse_number(cells[5], "close", line_no);
    row.v[4] = parse_number(cells[6], "volume", line_no);
    for (int f = 0; f < 4; ++f) {
      if (!(row.v[f] > 0.0))
        throw std::runtime_error("line " + std::to_string(line_no) + ": non-positive " +
                                 std::string(kFieldNames[f]) + " for tradable row");
    }
    if (row.v[4] < 0.0)
      throw std::runtime_error("line " + std::to_string(line_no) + ": negative volume");
    auto key = std::make_pair(date, asset);
    if (!rows.emplace(key, row).second)
      throw std::runtime_error("line " + std::to_string(line_no) + ": duplicate (date, asset) row");
    dates.insert(date);
    asset_ids.insert(asset);
  }

  if (dates.size() < 2) throw std::runtime_error("panel needs at least 2 distinct days");

  OhlcvPanel panel;
  panel.days.assign(dates.begin(), dates.end());
  panel.assets.assign(asset_ids.begin(), asset_ids.end());
  const int na = panel.n_assets();
  const int nd = panel.n_days();
  for (auto& m : panel.values) m = Mat::Zero(na, nd);
  panel.tradable = BoolGrid::Constant(na, nd, false);

  std::map<std::string, int> day_index;
  std::map<std::string, int> asset_index;
  for (int t = 0; t < nd; ++t) day_index[panel.days[t]] = t;
  for (int a = 0; a < na; ++a) asset_index[panel.assets[a]] = a;

  for (const auto& [key, row] : rows) {
    const int t = day_index[key.first];
    const int a = asset_index[key.second];
    for (int f = 0; f < kNumFields; ++f) panel.values[f](a, t) = row.v[f];
    panel.tradable(a, t) = true;
  }
  panel.validate();
  return panel;
}

void write_panel_csv(const OhlcvPanel& panel, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write panel file: " + path.string());
  out << "date,asset_id,open,high,low,close,volume\n";
  for (int t = 0; t < panel.n_days(); ++t) {
    for (int a = 0; a < panel.n_assets(); ++a) {
      if (!panel.tradable(a, t)) continue;
      out << panel.days[t] << ',' << panel.assets[a];
      for (int f = 0; f < kNumFields; ++f) out << ',' << format_double(panel.values[f](a, t));
      out << '\n';
    }
  }
}

void write_feature_csv(const FeaturePanel& feature, const OhlcvPanel& panel,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write feature file: " + path.string());
  out << "date,asset_id,value\n";
  for (int t = 0; t < panel.n_days(); ++t) {
    for (int a = 0; a < panel.n_assets(); ++a) {
      if (!feature.valid(a, t)) continue;
      out << panel.days[t] << ',' << panel.assets[a] << ',' << format_double(feature.values(a, t))
          << '\n';
    }
  }
}

FeaturePanel load_feature_csv(const OhlcvPanel& panel, const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open feature file: " + path.string());
  std::map<std::string, int> day_index;
  std::map<std::string, int> asset_index;
  for (int t = 0; t < panel.n_days(); ++t) day_index[panel.days[t]] = t;
  for (int a = 0; a < panel.n_assets(); ++a) asset_index[panel.assets[a]] = a;

  FeaturePanel feature;
  feature.values = Mat::Zero(panel.n_assets(), panel.n_days());
  feature.valid = BoolGrid::Constant(panel.n_assets(), panel.n_days(), false);

  std::string line;
  int line_no = 0;
  if (!std::getline(file, line)) throw std::runtime_error("empty feature file: " + path.string());
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "date,asset_id,value")
    throw std::runtime_error("line 1: expected header 'date,asset_id,value'");
  while (std::getline(file, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 3)
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 3 columns");
    auto dit = day_index.find(cells[0]);
    auto ait = asset_index.find(cells[1]);
    if (dit == day_index.end())
      throw std::runtime_error("line " + std::to_string(line_no) + ": unknown date " + cells[0]);
    if (ait == asset_index.end())
      throw std::runtime_error("line " + std::to_string(line_no) + ": unknown asset " + cells[1]);
    feature.values(ait->second, dit->second) = parse_number(cells[2], "value", line_no);
    feature.valid(ait->second, dit->second) = true;
  }
  return feature;
}

}  // namespace alphakit
