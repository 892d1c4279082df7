#include "nhgcn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nhgcn/error.hpp"

namespace nhg {

void LabelVec::validate() const {
  if (num_classes < 2) throw InputError("class count must be >= 2, got " + std::to_string(num_classes));
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] >= num_classes) {
      throw InputError("label of node " + std::to_string(i) + " is " + std::to_string(y[i]) +
                       ", outside [0, " + std::to_string(num_classes) + ")");
    }
  }
}

double NhVector::mean() const {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

NhVector nh_values(const KHopIndex& idx, const LabelVec& labels) {
  labels.validate();
  if (labels.size() != idx.num_nodes()) {
    throw ShapeError("label vector covers " + std::to_string(labels.size()) + " nodes, graph has " +
                     std::to_string(idx.num_nodes()));
  }
  const std::size_t n = idx.num_nodes();
  NhVector out;
  out.k = idx.k();
  out.num_classes = labels.num_classes;
  out.values.resize(n);
  out.dominant.resize(n);
  std::vector<std::size_t> counts(labels.num_classes);
  for (std::size_t i = 0; i < n; ++i) {
    auto hood = idx.neighborhood(static_cast<NodeId>(i));
    if (hood.empty()) {
      out.values[i] = 1.0;
      out.dominant[i] = 0;
      continue;
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (NodeId j : hood) ++counts[labels.y[j]];
    // max_element returns the first maximum: lowest class id on ties.
    auto best = std::max_element(counts.begin(), counts.end());
    out.dominant[i] = static_cast<std::uint32_t>(best - counts.begin());
    out.values[i] = static_cast<double>(*best) / static_cast<double>(hood.size());
  }
  return out;
}

NhVector nh_update(const KHopIndex& idx, const LabelVec& predicted) {
  return nh_values(idx, predicted);
}

NodeHomophily node_homophily(const Graph& g, const LabelVec& labels) {
  labels.validate();
  if (labels.size() != g.num_nodes()) {
    throw ShapeError("label vector covers " + std::to_string(labels.size()) + " nodes, graph has " +
                     std::to_string(g.num_nodes()));
  }
  NodeHomophily out;
  out.per_node.resize(g.num_nodes(), 0.0);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    auto nb = g.neighbors(static_cast<NodeId>(i));
    if (nb.empty()) continue;
    const auto same = std::count_if(nb.begin(), nb.end(),
                                    [&](NodeId j) { return labels.y[j] == labels.y[i]; });
    out.per_node[i] = static_cast<double>(same) / static_cast<double>(nb.size());
  }
  if (!out.per_node.empty()) {
    out.graph_level = std::accumulate(out.per_node.begin(), out.per_node.end(), 0.0) /
                      static_cast<double>(out.per_node.size());
  }
  return out;
}

NhVector normalize_metric(const NhVector& raw) {
  if (raw.num_classes < 2) {
    throw InputError("cannot normalize a metric with class count " + std::to_string(raw.num_classes));
  }
  if (raw.normalized) return raw;
  NhVector out = raw;
  const double lo = 1.0 / static_cast<double>(raw.num_classes);
  for (double& x : out.values) x = (x - lo) / (1.0 - lo);
  out.normalized = true;
  return out;
}

MaskPair make_masks(const NhVector& v, double threshold) {
  if (v.normalized) throw InputError("masks are defined on raw NH values");
  MaskPair m;
  m.threshold = threshold;
  m.low.resize(v.size());
  m.high.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    m.low[i] = v.values[i] <= threshold ? 1 : 0;
    m.high[i] = static_cast<std::uint8_t>(1 - m.low[i]);
  }
  return m;
}

double masking_accuracy(const MaskPair& predicted, const MaskPair& real) {
  if (predicted.low.size() != real.low.size()) throw ShapeError("mask pairs differ in length");
  if (real.low.empty()) return 1.0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < real.low.size(); ++i) agree += predicted.low[i] == real.low[i];
  return static_cast<double>(agree) / static_cast<double>(real.low.size());
}

std::size_t BinTable::bin_of(double x) {
  const double scaled = std::floor(x * static_cast<double>(kNumBins));
  if (scaled <= 0.0) return 0;
  return std::min(kNumBins - 1, static_cast<std::size_t>(scaled));
}

BinTable bin_accuracy(std::span<const double> metric, std::span<const std::uint8_t> correct) {
  if (metric.size() != correct.size()) throw ShapeError("metric and correctness vectors differ in length");
  BinTable t;
  for (std::size_t i = 0; i < metric.size(); ++i) {
    BinStat& b = t.bins[BinTable::bin_of(metric[i])];
    ++b.count;
    b.correct += correct[i] ? 1 : 0;
  }
  for (BinStat& b : t.bins) {
    if (b.count > 0) b.accuracy = static_cast<double>(b.correct) / static_cast<double>(b.count);
  }
  return t;
}

}  // namespace nhg
