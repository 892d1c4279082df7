#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nhgcn/graph.hpp"

namespace nhg {

/// Per-node class ids in [0, num_classes). Every node is labeled.
struct LabelVec {
  std::vector<std::uint32_t> y;
  std::size_t num_classes = 0;

  std::size_t size() const { return y.size(); }
  /// Throws InputError if num_classes < 2 or any id is out of range.
  void validate() const;
};

/// Neighborhood homophily per node for hop k. Raw values lie in [1/C, 1];
/// normalized values in [0, 1].
struct NhVector {
  std::vector<double> values;
  /// Most frequent neighborhood class, lowest id on ties (0 for isolated nodes).
  std::vector<std::uint32_t> dominant;
  std::size_t k = 1;
  std::size_t num_classes = 0;
  bool normalized = false;

  std::size_t size() const { return values.size(); }
  double mean() const;
};

/// |N(i,k,c_max)| / |N(i,k)| over `labels`; isolated nodes get 1.
NhVector nh_values(const KHopIndex& idx, const LabelVec& labels);

/// Same arithmetic as nh_values, fed with model predictions.
NhVector nh_update(const KHopIndex& idx, const LabelVec& predicted);

struct NodeHomophily {
  std::vector<double> per_node;
  double graph_level = 0.0;
};

/// Fraction of direct neighbors sharing the node's label; isolated nodes get 0.
NodeHomophily node_homophily(const Graph& g, const LabelVec& labels);

/// Min-max over the theoretical range: (x - 1/C) / (1 - 1/C).
NhVector normalize_metric(const NhVector& raw);

struct MaskPair {
  DiagMask low;
  DiagMask high;
  double threshold = 1.0;
};

/// low[i] = 1 iff v[i] <= threshold (raw scale); high is the complement.
MaskPair make_masks(const NhVector& v, double threshold);

/// Fraction of nodes whose low-group membership agrees.
double masking_accuracy(const MaskPair& predicted, const MaskPair& real);

inline constexpr std::size_t kNumBins = 10;

struct BinStat {
  std::size_t count = 0;
  std::size_t correct = 0;
  /// Empty when the bin holds no nodes.
  std::optional<double> accuracy;
};

/// Ten bins of width 0.1 over [0, 1]; the last bin is closed.
struct BinTable {
  std::array<BinStat, kNumBins> bins;

  static std::size_t bin_of(double x);
};

/// Bins `metric` (values in [0, 1]) and averages `correct` within each bin.
BinTable bin_accuracy(std::span<const double> metric, std::span<const std::uint8_t> correct);

}  // namespace nhg
