#include "nhgcn/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nhgcn/error.hpp"

namespace nhg {

namespace {

struct Preset {
  const char* name;
  std::size_t hidden;
  double lr;
  double weight_decay;
  double dropout_agg;
  double dropout_comb;
  Activation activation;
  std::size_t hop;
  bool self_loop;
  Combiner combiner;
  double inv_threshold;
};

constexpr auto R = Activation::kRelu;
constexpr auto Th = Activation::kTanh;
constexpr auto Add = Combiner::kAdd;
constexpr auto Cat = Combiner::kConcatenate;
constexpr auto Max = Combiner::kMaxpooling;

constexpr Preset kNhgcnPresets[] = {
    {"cora", 512, 0.1, 1e-3, 0.9, 0.3, R, 1, true, Max, 2.25},
    {"citeseer", 512, 0.001, 0, 0.7, 0.5, R, 1, true, Max, 3.25},
    {"pubmed", 512, 0.1, 1e-4, 0.5, 0, R, 1, true, Add, 3.5},
    {"photo", 512, 0.05, 5e-5, 0.9, 0.7, R, 3, false, Max, 3.75},
    {"computers", 512, 0.05, 5e-5, 0.4, 0.4, R, 1, false, Add, 4},
    {"chameleon", 512, 0.002, 0, 0, 0.7, Th, 2, false, Add, 4.1},
    {"actor", 512, 0.1, 1e-3, 0.7, 0.5, R, 2, true, Add, 3.5},
    {"squirrel", 512, 0.002, 0, 0.4, 0.6, Th, 1, false, Max, 4},
    {"texas", 512, 0.08, 1e-4, 0.7, 0.5, R, 1, false, Add, 5},
    {"cornell", 64, 0.01, 5e-4, 0.6, 0.5, R, 3, false, Max, 3.8},
};

constexpr Preset kNhgcnSsPresets[] = {
    {"cora", 256, 0.05, 0, 0.9, 0.4, R, 3, true, Max, 4},
    {"citeseer", 512, 0.001, 0, 0.6, 0.3, R, 3, true, Max, 3.5},
    {"pubmed", 512, 0.1, 1e-4, 0.5, 0.6, R, 2, true, Cat, 3},
    {"photo", 128, 0.08, 5e-5, 0.8, 0, R, 1, false, Add, 3},
    {"computers", 64, 0.1, 5e-5, 0.6, 0.3, R, 3, false, Add, 6},
    {"chameleon", 512, 0.002, 0, 0, 0.6, Th, 1, false, Max, 4.25},
    {"actor", 512, 0.1, 1e-3, 0.8, 0.9, R, 1, true, Cat, 4.75},
    {"squirrel", 256, 0.001, 5e-5, 0, 0.5, Th, 1, false, Add, 4.75},
    {"texas", 512, 0.1, 1e-3, 0.5, 0, R, 3, true, Cat, 4.8},
    {"cornell", 64, 0.01, 5e-4, 0.4, 0.5, R, 1, false, Max, 3.7},
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
  throw ConfigError("config key '" + key + "': invalid value '" + value + "' (expected " + expected + ")");
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v, "a real number");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "a non-negative integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad_value(key, v, "true or false");
}

// "0,1,2" or "0-9" (inclusive), or a mix of both.
std::vector<std::uint64_t> to_seeds(const std::string& key, const std::string& v) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) bad_value(key, v, "comma-separated seeds or a range a-b");
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(to_uint(key, item));
      continue;
    }
    const std::uint64_t lo = to_uint(key, item.substr(0, dash));
    const std::uint64_t hi = to_uint(key, item.substr(dash + 1));
    if (hi < lo || hi - lo > 100000) bad_value(key, v, "an ascending range");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

std::string fmt(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string dataset_stem(const std::string& path) {
  std::filesystem::path p(path);
  if (p.filename().empty()) p = p.parent_path();
  return lower(p.filename().string());
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "arch",          "preset",       "dataset",       "out",
      "hidden",        "activation",   "combiner",      "self_loop",
      "dropout_agg",   "dropout_comb", "hop",           "inv_threshold",
      "share_weights", "renormalize_after_mask",        "lr",
      "weight_decay",  "max_epochs",   "patience",      "seed",
      "seeds",         "threads",      "train_ratio",   "val_ratio",
      "test_ratio",    "nh_label_source",
  };
  return keys;
}

std::vector<Setting> parse_settings(const std::string& text) {
  std::vector<Setting> out;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out.emplace_back(std::move(key), trim(line.substr(eq + 1)));
  }
  return out;
}

std::vector<Setting> read_settings(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError(file.string() + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_settings(ss.str());
}

RunConfig preset_config(const std::string& dataset_name, Arch arch) {
  RunConfig cfg;
  cfg.model.arch = arch;
  cfg.model.share_weights = arch == Arch::kNhgcnSs;
  cfg.model.hidden = 64;
  cfg.model.dropout_agg = 0.5;
  cfg.model.dropout_comb = 0.5;
  cfg.model.activation = Activation::kRelu;
  cfg.train.lr = 0.01;
  cfg.train.weight_decay = 5e-4;
  cfg.seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};

  std::span<const Preset> table;
  if (arch == Arch::kNhgcn) table = kNhgcnPresets;
  if (arch == Arch::kNhgcnSs) table = kNhgcnSsPresets;
  const std::string name = lower(dataset_name);
  for (const Preset& p : table) {
    if (name != p.name) continue;
    cfg.preset = p.name;
    cfg.model.hidden = p.hidden;
    cfg.train.lr = p.lr;
    cfg.train.weight_decay = p.weight_decay;
    cfg.model.dropout_agg = p.dropout_agg;
    cfg.model.dropout_comb = p.dropout_comb;
    cfg.model.activation = p.activation;
    cfg.model.hop = p.hop;
    cfg.model.self_loop = p.self_loop;
    cfg.model.combiner = p.combiner;
    cfg.model.inv_threshold = p.inv_threshold;
  }
  return cfg;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& v) {
  ModelConfig& m = cfg.model;
  TrainConfig& t = cfg.train;
  try {
    if (key == "arch") {
      m.arch = parse_arch(v);
    } else if (key == "hidden") {
      m.hidden = to_uint(key, v);
    } else if (key == "activation") {
      m.activation = parse_activation(v);
    } else if (key == "combiner") {
      m.combiner = parse_combiner(v);
    } else if (key == "self_loop") {
      m.self_loop = to_bool(key, v);
    } else if (key == "dropout_agg") {
      m.dropout_agg = to_double(key, v);
    } else if (key == "dropout_comb") {
      m.dropout_comb = to_double(key, v);
    } else if (key == "hop") {
      m.hop = to_uint(key, v);
    } else if (key == "inv_threshold") {
      m.inv_threshold = to_double(key, v);
    } else if (key == "share_weights") {
      m.share_weights = to_bool(key, v);
    } else if (key == "renormalize_after_mask") {
      m.renormalize_after_mask = to_bool(key, v);
    } else if (key == "lr") {
      t.lr = to_double(key, v);
    } else if (key == "weight_decay") {
      t.weight_decay = to_double(key, v);
    } else if (key == "max_epochs") {
      t.max_epochs = to_uint(key, v);
    } else if (key == "patience") {
      t.patience = to_uint(key, v);
    } else if (key == "seed") {
      t.seed = to_uint(key, v);
    } else if (key == "seeds") {
      cfg.seeds = to_seeds(key, v);
    } else if (key == "threads") {
      cfg.threads = to_uint(key, v);
    } else if (key == "train_ratio") {
      t.ratios.train = to_double(key, v);
    } else if (key == "val_ratio") {
      t.ratios.val = to_double(key, v);
    } else if (key == "test_ratio") {
      t.ratios.test = to_double(key, v);
    } else if (key == "nh_label_source") {
      t.nh_label_source = parse_nh_label_source(v);
    } else if (key == "dataset") {
      cfg.dataset = v;
    } else if (key == "out") {
      cfg.out = v;
    } else if (key == "preset") {
      cfg.preset = v;
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.find('\'' + key + '\'') != std::string::npos) throw;
    throw ConfigError("config key '" + key + "': " + msg);
  }
}

RunConfig resolve_config(const std::vector<Setting>& settings) {
  std::string arch = "nhgcn";
  std::string dataset;
  std::string preset;
  for (const auto& [k, v] : settings) {
    if (k == "arch") arch = v;
    if (k == "dataset") dataset = v;
    if (k == "preset") preset = v;
  }
  const Arch a = parse_arch(arch);
  RunConfig cfg = preset_config(preset.empty() ? dataset_stem(dataset) : preset, a);
  for (const auto& [k, v] : settings) apply_setting(cfg, k, v);
  if (cfg.seeds.empty()) throw ConfigError("config key 'seeds': empty seed list");
  if (cfg.threads == 0) throw ConfigError("config key 'threads': must be >= 1");
  cfg.train.validate();
  // shape fields come from the dataset later; check everything else now
  ModelConfig probe = cfg.model;
  probe.in_features = std::max<std::size_t>(probe.in_features, 1);
  probe.num_classes = std::max<std::size_t>(probe.num_classes, 2);
  probe.validate();
  return cfg;
}

std::string echo_config(const RunConfig& cfg) {
  const ModelConfig& m = cfg.model;
  const TrainConfig& t = cfg.train;
  std::string seeds;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    if (i) seeds += ',';
    seeds += std::to_string(cfg.seeds[i]);
  }
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  std::ostringstream os;
  os << "arch=" << to_string(m.arch) << "\n"
     << "preset=" << cfg.preset << "\n"
     << "dataset=" << cfg.dataset << "\n"
     << "out=" << cfg.out << "\n"
     << "hidden=" << m.hidden << "\n"
     << "activation=" << to_string(m.activation) << "\n"
     << "combiner=" << to_string(m.combiner) << "\n"
     << "self_loop=" << b(m.self_loop) << "\n"
     << "dropout_agg=" << fmt(m.dropout_agg) << "\n"
     << "dropout_comb=" << fmt(m.dropout_comb) << "\n"
     << "hop=" << m.hop << "\n"
     << "inv_threshold=" << fmt(m.inv_threshold) << "\n"
     << "share_weights=" << b(m.share_weights) << "\n"
     << "renormalize_after_mask=" << b(m.renormalize_after_mask) << "\n"
     << "lr=" << fmt(t.lr) << "\n"
     << "weight_decay=" << fmt(t.weight_decay) << "\n"
     << "max_epochs=" << t.max_epochs << "\n"
     << "patience=" << t.patience << "\n"
     << "seed=" << t.seed << "\n"
     << "seeds=" << seeds << "\n"
     << "threads=" << cfg.threads << "\n"
     << "train_ratio=" << fmt(t.ratios.train) << "\n"
     << "val_ratio=" << fmt(t.ratios.val) << "\n"
     << "test_ratio=" << fmt(t.ratios.test) << "\n"
     << "nh_label_source=" << to_string(t.nh_label_source) << "\n";
  return os.str();
}

}  // namespace nhg
