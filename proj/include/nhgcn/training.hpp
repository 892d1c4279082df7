#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nhgcn/graph.hpp"
#include "nhgcn/metrics.hpp"
#include "nhgcn/model.hpp"
#include "nhgcn/optim.hpp"
#include "nhgcn/tensor.hpp"

namespace nhg {

enum class NhLabelSource {
  /// Model predictions for every node.
  kPredictedAll,
  /// Ground truth on training nodes, predictions elsewhere.
  kTrainTruthPlusPredicted,
};

std::string to_string(NhLabelSource s);
NhLabelSource parse_nh_label_source(const std::string& s);

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

struct TrainConfig {
  double lr = 0.01;
  double weight_decay = 5e-4;
  std::size_t max_epochs = 500;
  std::size_t patience = 100;
  std::uint64_t seed = 0;
  SplitRatios ratios;
  NhLabelSource nh_label_source = NhLabelSource::kPredictedAll;

  void validate() const;
};

/// Disjoint, sorted node sets covering [0, n).
struct Split {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
};

/// Seeded uniform shuffle cut at round(ratio * n). Throws InputError for
/// n < 5 or ratios that leave a set empty.
Split make_split(std::size_t n, const LabelVec& labels, std::uint64_t seed, const SplitRatios& ratios);

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  double acc_train = 0.0;
  double acc_val = 0.0;
  double acc_test = 0.0;
  bool nh_updated = false;
  /// Agreement of the epoch's masks with ground-truth masks (mask models only).
  std::optional<double> mask_acc;
  /// Combiner weights after the step (empty without learnable weights).
  std::vector<double> alpha;
  double seconds = 0.0;
};

struct NhUpdateEvent {
  std::size_t epoch = 0;
  NhVector nh;
};

struct RunResult {
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  double best_val = 0.0;
  /// Test accuracy of the best-validation parameters with the masks that
  /// were active in that epoch.
  double test_acc = 0.0;
  /// Same parameters evaluated with masks from the final NH estimate.
  double test_acc_final_masks = 0.0;
  /// Running maximum of validation accuracy at each improvement.
  std::vector<double> best_val_history;
  ParamSet best_params;
  MaskPair best_masks;
  NhVector final_nh;
  std::vector<NhUpdateEvent> nh_history;
  double total_seconds = 0.0;
};

/// Called once per epoch with the masks used in that epoch and the
/// evaluation-mode prediction after the optimizer step.
using EpochObserver = std::function<void(std::size_t epoch, const MaskPair& masks, const Prediction& eval)>;

double accuracy(const LabelVec& predicted, const LabelVec& truth, std::span<const NodeId> nodes);

/// Alternating NH estimation and training with early stopping on
/// validation accuracy. Throws DivergenceError on a non-finite loss.
RunResult train_run(const Graph& g, const Tensor& x, const LabelVec& labels, const Split& split,
                    const ModelConfig& mcfg, const TrainConfig& tcfg,
                    const EpochObserver& observer = nullptr);

/// Evaluation-mode prediction for given parameters and (optional) masks.
Prediction evaluate(const Graph& g, const Tensor& x, const ParamSet& params, const MaskPair* masks,
                    const ModelConfig& mcfg);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  double test_acc = 0.0;
  std::size_t best_epoch = 0;
  std::string error;
  RunResult result;
};

struct MultiSeedResult {
  std::vector<SeedOutcome> runs;
  double mean = 0.0;
  /// Sample standard deviation over successful runs.
  double stddev = 0.0;
  std::size_t excluded = 0;
};

/// Mean and sample standard deviation, independent of input order.
std::pair<double, double> mean_and_sample_std(std::vector<double> values);

/// One run per seed, each seed fixing both split and initialization.
/// Diverged runs are excluded from the statistics and reported in `runs`.
/// Requires at least two seeds.
MultiSeedResult multi_seed(const Graph& g, const Tensor& x, const LabelVec& labels,
                           const ModelConfig& mcfg, const TrainConfig& base,
                           std::span<const std::uint64_t> seeds, std::size_t threads = 1);

}  // namespace nhg
