#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "nhgcn/config.hpp"
#include "nhgcn/metrics.hpp"
#include "nhgcn/optim.hpp"

namespace nhg {

/// Trained parameters plus what is needed to evaluate them again: the full
/// run config (model shape included) and, for mask models, the masks that
/// were active when the parameters were saved.
struct Checkpoint {
  RunConfig config;
  std::string dataset_name;
  ParamSet params;
  std::optional<MaskPair> masks;
};

/// Text file; parameter values are written as hex floats so a reload is exact.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file);

/// Throws IoError for a missing or malformed file.
Checkpoint load_checkpoint(const std::filesystem::path& file);

}  // namespace nhg
