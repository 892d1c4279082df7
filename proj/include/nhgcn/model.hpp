#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "nhgcn/autodiff.hpp"
#include "nhgcn/graph.hpp"
#include "nhgcn/metrics.hpp"
#include "nhgcn/optim.hpp"
#include "nhgcn/tensor.hpp"

namespace nhg {

enum class Arch { kNhgcn, kNhgcnSs, kGcn, kMlp, kGcnPlusX };
enum class Activation { kRelu, kTanh };
enum class Combiner { kAdd, kConcatenate, kMaxpooling };
enum class Mode { kTrain, kEval };

std::string to_string(Arch a);
std::string to_string(Activation a);
std::string to_string(Combiner c);
/// Parsers throw ConfigError on unknown names.
Arch parse_arch(const std::string& s);
Activation parse_activation(const std::string& s);
Combiner parse_combiner(const std::string& s);

struct ModelConfig {
  Arch arch = Arch::kNhgcn;
  std::size_t in_features = 0;
  std::size_t hidden = 64;
  std::size_t num_classes = 0;
  Activation activation = Activation::kRelu;
  Combiner combiner = Combiner::kAdd;
  bool self_loop = true;
  /// Applied to X before layer 1 and to H1 before layer 2.
  double dropout_agg = 0.5;
  /// Applied to the combined representation before the output projection.
  double dropout_comb = 0.5;
  std::size_t hop = 1;
  /// The NH threshold is configured as its reciprocal, T = 1 / inv_threshold.
  double inv_threshold = 2.0;
  /// One W1/W2 pair used by both graph channels.
  bool share_weights = false;
  /// Use norm(M A) with masked degrees instead of M norm(A).
  bool renormalize_after_mask = false;

  double threshold() const { return 1.0 / inv_threshold; }
  bool uses_masks() const { return arch == Arch::kNhgcn || arch == Arch::kNhgcnSs; }
  /// Number of channels merged by the combiner (0 for gcn/mlp).
  std::size_t num_channels() const;
  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// Glorot-initialized parameters; combiner weights start at zero logits.
ParamSet init_params(const ModelConfig& cfg, std::uint64_t seed);

/// Sparse propagation operators for one mask state.
struct Operators {
  std::shared_ptr<const SparseMatrix> full;
  std::shared_ptr<const SparseMatrix> low_target, low_source;
  std::shared_ptr<const SparseMatrix> high_target, high_source;
};

/// `masks` may be null for architectures that do not use them.
Operators build_operators(const Graph& g, const NormAdj& norm, const MaskPair* masks,
                          const ModelConfig& cfg);

/// Recorded forward pass. Channel handles are invalid when the architecture
/// has no such channel.
struct ForwardPass {
  Tape tape;
  Var probs;
  Var logits;
  Var h_low, h_high, h_graph, h_x, h_o;
  Var alpha;
};

ForwardPass forward(const ParamSet& params, const Tensor& x, const Operators& ops,
                    const ModelConfig& cfg, Mode mode, std::uint64_t seed);

struct Prediction {
  Tensor probs;
  LabelVec labels;
};

Prediction predict(const ForwardPass& pass, std::size_t num_classes);
/// Row-wise argmax, lowest class on ties.
LabelVec argmax_labels(const Tensor& probs, std::size_t num_classes);

/// Convenience wrappers that build the operators from the graph.
Prediction nhgcn_forward(const ParamSet& params, const Tensor& x, const Graph& g,
                         const MaskPair& masks, const ModelConfig& cfg, Mode mode,
                         std::uint64_t seed);
Prediction nhgcn_ss_forward(const ParamSet& params, const Tensor& x, const Graph& g,
                            const MaskPair& masks, const ModelConfig& cfg, Mode mode,
                            std::uint64_t seed);
Prediction baseline_forward(const ParamSet& params, const Tensor& x, const Graph& g,
                            const ModelConfig& cfg, Mode mode, std::uint64_t seed);

inline constexpr double kProbFloor = 1e-12;

/// -trace(Y_train^T log B) with B floor-clamped. Y_train holds one-hot rows
/// for training nodes and zero rows elsewhere.
double loss_trace(const Tensor& probs, const Tensor& y_train);
/// -sum_{i in train} log B[i, y_i], the per-node form of the same loss.
double loss_nll(const Tensor& probs, const LabelVec& labels, std::span<const NodeId> train);
Tensor one_hot_rows(const LabelVec& labels, std::span<const NodeId> nodes);

/// Negative log-likelihood over `train` recorded on the pass, summed or
/// averaged. Throws InputError if `train` is empty.
Var record_loss(ForwardPass& pass, const LabelVec& labels, std::span<const NodeId> train,
                bool average);

/// Runs backward from `loss` and returns d(loss)/d(param) in the layout of
/// `params`; parameters the pass never touched get zeros.
Gradients backprop(ForwardPass& pass, const ParamSet& params, Var loss);

}  // namespace nhg
