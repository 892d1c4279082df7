#pragma once

#include <cstdint>

#include "nhgcn/dataset.hpp"
#include "nhgcn/model.hpp"
#include "nhgcn/optim.hpp"

namespace nhg {

/// Random 12-node, 3-class, 5-feature instance with a few isolated nodes
/// and masks drawn from random labels.
struct TinyInstance {
  Dataset data;
  MaskPair masks;
  std::vector<NodeId> train;
};

TinyInstance tiny_instance(std::uint64_t seed);

/// Finite-difference check of the summed training loss of `cfg` on a tiny
/// instance. Shape fields of `cfg` are replaced by the instance's, and the
/// hidden width is capped at 4. Dropout stays active with a fixed mask.
GradCheckReport check_model_gradients(ModelConfig cfg, std::uint64_t seed, std::size_t probes = 60);

}  // namespace nhg
