#include "alphakit/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace alphakit {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& value, const std::string& key) {
  T parsed{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, parsed);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError(key + ": cannot parse '" + value + "'");
  }
  return parsed;
}

// GCC 11 lacks floating-point from_chars completeness guarantees elsewhere;
// stod with a full-consumption check keeps behavior uniform.
double parse_double_value(const std::string& value, const std::string& key) {
  std::size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + value + "'");
  }
  if (used != value.size()) throw ConfigError(key + ": cannot parse '" + value + "'");
  return parsed;
}

bool parse_bool_value(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& value, const std::string& key) {
  std::vector<int> out;
  std::istringstream stream(value);
  std::string cell;
  while (std::getline(stream, cell, ',')) {
    out.push_back(parse_number<int>(trim(cell), key));
  }
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated integer list");
  return out;
}

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& value, const std::string& key)>;

const std::unordered_map<std::string, Setter>& setters() {
  static const std::unordered_map<std::string, Setter> table = {
      {"run.seed",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.seed = parse_number<std::uint64_t>(v, k);
       }},
      {"run.workers",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.workers = parse_number<int>(v, k);
       }},
      {"data.source",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         if (v != "synthetic" && v != "csv") {
           throw ConfigError(k + ": expected synthetic or csv, got '" + v + "'");
         }
         c.source = v;
       }},
      {"data.path", [](RunConfig& c, const std::string& v, const std::string&) { c.path = v; }},
      {"data.window_len",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.window_len = parse_number<int>(v, k);
       }},
      {"data.horizon",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.horizon = parse_number<int>(v, k);
       }},
      {"data.train_days",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.splits.train = parse_number<int>(v, k);
       }},
      {"data.val_days",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.splits.val = parse_number<int>(v, k);
       }},
      {"data.test_days",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.splits.test = parse_number<int>(v, k);
       }},
      {"data.min_cross_section",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.min_cross_section = parse_number<int>(v, k);
       }},
      {"data.n_assets",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.n_assets = parse_number<int>(v, k);
       }},
      {"data.n_days",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.n_days = parse_number<int>(v, k);
       }},
      {"data.planted_feature",
       [](RunConfig& c, const std::string& v, const std::string&) { c.planted_feature = v; }},
      {"data.signal_beta",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.signal_beta = parse_double_value(v, k);
       }},
      {"data.noise_sigma",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.noise_sigma = parse_double_value(v, k);
       }},
      {"data.base_vol",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.base_vol = parse_double_value(v, k);
       }},
      {"data.base_price",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.base_price = parse_double_value(v, k);
       }},
      {"data.base_volume",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.base_volume = parse_double_value(v, k);
       }},
      {"gp.population",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.gp.population = parse_number<int>(v, k);
       }},
      {"gp.generations",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.gp.generations = parse_number<int>(v, k);
       }},
      {"gp.tournament",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.gp.tournament = parse_number<int>(v, k);
       }},
      {"gp.p_crossover",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.gp.p_crossover = parse_double_value(v, k);
       }},
      {"gp.p_subtree_mutation",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.gp.p_subtree_mutation = parse_double_value(v, k);
       }},
      {"gp.p_point_mutation",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.gp.p_point_mutation = parse_double_value(v, k);
       }},
      {"gp.max_depth",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.gp.max_depth = parse_number<int>(v, k);
       }},
      {"gp.elitism",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.gp.elitism = parse_number<int>(v, k);
       }},
      {"gp.top_m",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.gp.top_m = parse_number<int>(v, k);
       }},
      {"adnn.hidden",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.hidden = parse_int_list(v, k);
       }},
      {"adnn.learning_rate",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.learning_rate = parse_double_value(v, k);
       }},
      {"adnn.beta1",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.beta1 = parse_double_value(v, k);
       }},
      {"adnn.beta2",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.beta2 = parse_double_value(v, k);
       }},
      {"adnn.adam_epsilon",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.adam_epsilon = parse_double_value(v, k);
       }},
      {"adnn.batch_days",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.batch_days = parse_number<int>(v, k);
       }},
      {"adnn.batches_per_epoch",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.batches_per_epoch = parse_number<int>(v, k);
       }},
      {"adnn.max_epochs",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.max_epochs = parse_number<int>(v, k);
       }},
      {"adnn.patience",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.patience = parse_number<int>(v, k);
       }},
      {"adnn.pretrain_epochs",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.pretrain_epochs = parse_number<int>(v, k);
       }},
      {"adnn.pretrain_epochs_random",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.pretrain_epochs_random = parse_number<int>(v, k);
       }},
      {"adnn.pretrain_fidelity",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.pretrain_fidelity = parse_double_value(v, k);
       }},
      {"adnn.kernel_p",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.kernel.p = parse_double_value(v, k);
       }},
      {"adnn.kernel_epsilon",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.kernel.epsilon_std = parse_double_value(v, k);
       }},
      {"diversity.metric",
       [](RunConfig& c, const std::string& v, const std::string&) {
         c.diversity_metric = parse_distance_metric(v);
       }},
      {"diversity.k_fraction",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.k_fraction = parse_double_value(v, k);
       }},
      {"diversity.raw_cross_entropy",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.raw_cross_entropy = parse_bool_value(v, k);
       }},
      {"scheme.n_features",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.n_features = parse_number<int>(v, k);
       }},
      {"scheme.random_teacher_net",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.random_teacher_net = parse_bool_value(v, k);
       }},
      {"scheme.classical_teachers",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.classical_teachers = parse_bool_value(v, k);
       }},
      {"output.directory",
       [](RunConfig& c, const std::string& v, const std::string&) { c.out_dir = v; }},
  };
  return table;
}

}  // namespace

SynthConfig RunConfig::synth_config() const {
  SynthConfig synth;
  synth.n_assets = n_assets;
  synth.n_days = n_days;
  synth.seed = derive_seed(seed, "synth");
  synth.planted_feature = planted_feature;
  synth.signal_beta = signal_beta;
  synth.noise_sigma = noise_sigma;
  synth.base_vol = base_vol;
  synth.base_price = base_price;
  synth.base_volume = base_volume;
  synth.horizon = horizon;
  return synth;
}

SchemeConfig RunConfig::scheme_config(Scheme scheme) const {
  SchemeConfig cfg;
  cfg.scheme = scheme;
  cfg.n_features = n_features;
  cfg.seed = seed;
  cfg.workers = workers;
  cfg.random_teacher_net = random_teacher_net;
  cfg.diversity_metric = diversity_metric;
  cfg.diversity_k_fraction = k_fraction;
  cfg.gp = gp;
  cfg.train = train;
  return cfg;
}

void RunConfig::validate() const {
  if (workers < 1) throw ConfigError("run.workers must be >= 1");
  if (source == "csv" && path.empty()) throw ConfigError("data.path required when source = csv");
  if (window_len < 1 || window_len > 250) throw ConfigError("data.window_len must be in [1, 250]");
  if (horizon < 1) throw ConfigError("data.horizon must be >= 1");
  if (splits.train < 2 || splits.val < 1 || splits.test < 1) {
    throw ConfigError("data.train_days/val_days/test_days must be positive (train_days >= 2)");
  }
  if (min_cross_section < 2) throw ConfigError("data.min_cross_section must be >= 2");
  if (source == "synthetic") synth_config().validate();
  if (k_fraction <= 0.0 || k_fraction > 1.0) {
    throw ConfigError("diversity.k_fraction must be in (0, 1]");
  }
  scheme_config(Scheme::A).validate();
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream stream(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::string at = origin + " line " + std::to_string(line_no);
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.resize(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(at + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"run", "data", "gp", "adnn", "diversity", "scheme", "output"};
      bool ok = false;
      for (const char* name : known) ok = ok || section == name;
      if (!ok) throw ConfigError(at + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(at + ": expected key = value");
    if (section.empty()) throw ConfigError(at + ": key before any [section]");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(at + ": unknown key " + key);
    try {
      it->second(cfg, value, key);
    } catch (const ConfigError& e) {
      throw ConfigError(at + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

std::string resolved_config_text(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[run]\n";
  out << "seed = " << cfg.seed << '\n';
  out << "workers = " << cfg.workers << '\n';
  out << "\n[data]\n";
  out << "source = " << cfg.source << '\n';
  out << "path = " << cfg.path << '\n';
  out << "window_len = " << cfg.window_len << '\n';
  out << "horizon = " << cfg.horizon << '\n';
  out << "train_days = " << cfg.splits.train << '\n';
  out << "val_days = " << cfg.splits.val << '\n';
  out << "test_days = " << cfg.splits.test << '\n';
  out << "min_cross_section = " << cfg.min_cross_section << '\n';
  out << "n_assets = " << cfg.n_assets << '\n';
  out << "n_days = " << cfg.n_days << '\n';
  out << "planted_feature = " << cfg.planted_feature << '\n';
  out << "signal_beta = " << format_double(cfg.signal_beta) << '\n';
  out << "noise_sigma = " << format_double(cfg.noise_sigma) << '\n';
  out << "base_vol = " << format_double(cfg.base_vol) << '\n';
  out << "base_price = " << format_double(cfg.base_price) << '\n';
  out << "base_volume = " << format_double(cfg.base_volume) << '\n';
  out << "\n[gp]\n";
  out << "population = " << cfg.gp.population << '\n';
  out << "generations = " << cfg.gp.generations << '\n';
  out << "tournament = " << cfg.gp.tournament << '\n';
  out << "p_crossover = " << format_double(cfg.gp.p_crossover) << '\n';
  out << "p_subtree_mutation = " << format_double(cfg.gp.p_subtree_mutation) << '\n';
  out << "p_point_mutation = " << format_double(cfg.gp.p_point_mutation) << '\n';
  out << "max_depth = " << cfg.gp.max_depth << '\n';
  out << "elitism = " << cfg.gp.elitism << '\n';
  out << "top_m = " << cfg.gp.top_m << '\n';
  out << "\n[adnn]\n";
  out << "hidden = " << join_ints(cfg.train.hidden) << '\n';
  out << "learning_rate = " << format_double(cfg.train.learning_rate) << '\n';
  out << "beta1 = " << format_double(cfg.train.beta1) << '\n';
  out << "beta2 = " << format_double(cfg.train.beta2) << '\n';
  out << "adam_epsilon = " << format_double(cfg.train.adam_epsilon) << '\n';
  out << "batch_days = " << cfg.train.batch_days << '\n';
  out << "batches_per_epoch = " << cfg.train.batches_per_epoch << '\n';
  out << "max_epochs = " << cfg.train.max_epochs << '\n';
  out << "patience = " << cfg.train.patience << '\n';
  out << "pretrain_epochs = " << cfg.train.pretrain_epochs << '\n';
  out << "pretrain_epochs_random = " << cfg.train.pretrain_epochs_random << '\n';
  out << "pretrain_fidelity = " << format_double(cfg.train.pretrain_fidelity) << '\n';
  out << "kernel_p = " << format_double(cfg.train.kernel.p) << '\n';
  out << "kernel_epsilon = " << format_double(cfg.train.kernel.epsilon_std) << '\n';
  out << "\n[diversity]\n";
  out << "metric = " << distance_metric_name(cfg.diversity_metric) << '\n';
  out << "k_fraction = " << format_double(cfg.k_fraction) << '\n';
  out << "raw_cross_entropy = " << (cfg.raw_cross_entropy ? "true" : "false") << '\n';
  out << "\n[scheme]\n";
  out << "n_features = " << cfg.n_features << '\n';
  out << "random_teacher_net = " << (cfg.random_teacher_net ? "true" : "false") << '\n';
  out << "\n[output]\n";
  out << "directory = " << cfg.out_dir.string() << '\n';
  return out.str();
}

void write_resolved_config(const RunConfig& cfg, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << resolved_config_text(cfg);
}

}  // namespace alphakit
