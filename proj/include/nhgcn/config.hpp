#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nhgcn/model.hpp"
#include "nhgcn/training.hpp"

namespace nhg {

/// Everything needed to reproduce a run. `model.in_features` and
/// `model.num_classes` are filled in from the dataset at run time.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  std::string dataset;
  std::string out;
  /// Preset table used for defaults; empty means the dataset directory name.
  std::string preset;
  std::vector<std::uint64_t> seeds;
  std::size_t threads = 1;
};

using Setting = std::pair<std::string, std::string>;

/// Settings in file order; "#" starts a comment. Throws ConfigError with the
/// line number on malformed lines.
std::vector<Setting> read_settings(const std::filesystem::path& file);
std::vector<Setting> parse_settings(const std::string& text);

/// Tuned defaults for nhgcn / nhgcn_ss on the ten benchmark names; for any
/// other combination a two-layer, 64-unit, 0.5-dropout ReLU setup.
RunConfig preset_config(const std::string& dataset_name, Arch arch);

/// Picks the preset from the merged arch/dataset/preset keys, then applies
/// every setting in order (later ones win). Unknown keys and bad values raise
/// ConfigError naming the key.
RunConfig resolve_config(const std::vector<Setting>& settings);

/// Applies a single key to `cfg`.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Every key with its current value, one "key=value" per line, in a fixed
/// order. Feeding the echo back through resolve_config reproduces `cfg`.
std::string echo_config(const RunConfig& cfg);

/// Names of all accepted keys.
const std::vector<std::string>& config_keys();

}  // namespace nhg
