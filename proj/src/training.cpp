#include "nhgcn/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iostream>
#include <mutex>
#include <numeric>
#include <thread>

#include "nhgcn/error.hpp"
#include "nhgcn/rng.hpp"

namespace nhg {

std::string to_string(NhLabelSource s) {
  return s == NhLabelSource::kPredictedAll ? "predicted_all" : "train_truth_plus_predicted";
}

NhLabelSource parse_nh_label_source(const std::string& s) {
  if (s == "predicted_all") return NhLabelSource::kPredictedAll;
  if (s == "train_truth_plus_predicted") return NhLabelSource::kTrainTruthPlusPredicted;
  throw ConfigError("unknown nh_label_source '" + s + "' (predicted_all, train_truth_plus_predicted)");
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
  if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
  if (patience == 0 || patience > max_epochs) throw ConfigError("patience must lie in [1, max_epochs]");
  const double sum = ratios.train + ratios.val + ratios.test;
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 || std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be non-negative and sum to 1");
  }
}

Split make_split(std::size_t n, const LabelVec& labels, std::uint64_t seed, const SplitRatios& ratios) {
  if (n < 5) throw InputError("cannot split fewer than 5 nodes");
  if (labels.size() != n) throw ShapeError("label vector does not cover every node");
  const double sum = ratios.train + ratios.val + ratios.test;
  if (ratios.train <= 0 || ratios.val <= 0 || ratios.test <= 0 || std::abs(sum - 1.0) > 1e-9) {
    throw InputError("degenerate split ratios");
  }
  const auto n_train = static_cast<std::size_t>(std::llround(ratios.train * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(ratios.val * static_cast<double>(n)));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n) throw InputError("degenerate split ratios");

  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  Rng rng(mix_seed(seed, 0x5b1d));
  rng.shuffle(perm);
  Split s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
               perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

double accuracy(const LabelVec& predicted, const LabelVec& truth, std::span<const NodeId> nodes) {
  if (nodes.empty()) return 0.0;
  std::size_t hit = 0;
  for (NodeId i : nodes) hit += predicted.y[i] == truth.y[i];
  return static_cast<double>(hit) / static_cast<double>(nodes.size());
}

Prediction evaluate(const Graph& g, const Tensor& x, const ParamSet& params, const MaskPair* masks,
                    const ModelConfig& mcfg) {
  const NormAdj norm = normalize_adjacency(g, mcfg.self_loop);
  const Operators ops = build_operators(g, norm, masks, mcfg);
  return predict(forward(params, x, ops, mcfg, Mode::kEval, 0), mcfg.num_classes);
}

namespace {

NhVector initial_nh(std::size_t n, const ModelConfig& mcfg) {
  NhVector nh;
  nh.values.assign(n, 1.0);
  nh.dominant.assign(n, 0);
  nh.k = mcfg.hop;
  nh.num_classes = mcfg.num_classes;
  return nh;
}

std::vector<double> alpha_values(const ForwardPass& pass) {
  if (!pass.alpha.valid()) return {};
  return pass.tape.value(pass.alpha).data;
}

}  // namespace

RunResult train_run(const Graph& g, const Tensor& x, const LabelVec& labels, const Split& split,
                    const ModelConfig& mcfg, const TrainConfig& tcfg, const EpochObserver& observer) {
  using Clock = std::chrono::steady_clock;
  mcfg.validate();
  tcfg.validate();
  labels.validate();
  const std::size_t n = g.num_nodes();
  if (x.rows != n || labels.size() != n) throw ShapeError("graph, features and labels disagree on n");
  if (labels.num_classes != mcfg.num_classes) throw ShapeError("label class count differs from config");
  if (split.train.empty()) throw InputError("empty training set");

  const auto run_start = Clock::now();
  const NormAdj norm = normalize_adjacency(g, mcfg.self_loop);
  const bool masked = mcfg.uses_masks();
  KHopIndex hood;
  MaskPair real_masks;
  NhVector nh;
  MaskPair masks;
  if (masked) {
    hood = khop_index(g, mcfg.hop);
    real_masks = make_masks(nh_values(hood, labels), mcfg.threshold());
    nh = initial_nh(n, mcfg);
    masks = make_masks(nh, mcfg.threshold());
  }
  Operators ops = build_operators(g, norm, masked ? &masks : nullptr, mcfg);

  ParamSet params = init_params(mcfg, tcfg.seed);
  AdamState adam = make_adam(params, tcfg.lr, tcfg.weight_decay);

  RunResult result;
  result.best_params = params;
  std::size_t bad_epochs = 0;
  bool masks_stale = false;

  for (std::size_t epoch = 1; epoch <= tcfg.max_epochs; ++epoch) {
    const auto epoch_start = Clock::now();
    if (masked && masks_stale) {
      masks = make_masks(nh, mcfg.threshold());
      ops = build_operators(g, norm, &masks, mcfg);
      masks_stale = false;
    }

    ForwardPass pass = forward(params, x, ops, mcfg, Mode::kTrain, mix_seed(tcfg.seed, epoch));
    Var loss;
    try {
      loss = record_loss(pass, labels, split.train, true);
    } catch (const DivergenceError&) {
      throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch));
    }
    const double loss_value = pass.tape.value(loss).data[0];
    Gradients grads = backprop(pass, params, loss);
    adam_step(adam, params, grads);
    for (const auto& [name, t] : params) {
      if (!t.all_finite()) {
        throw DivergenceError("parameter " + name + " became non-finite at epoch " + std::to_string(epoch));
      }
    }

    ForwardPass eval_pass = forward(params, x, ops, mcfg, Mode::kEval, 0);
    Prediction pred = predict(eval_pass, mcfg.num_classes);

    EpochLog row;
    row.epoch = epoch;
    row.loss = loss_value;
    row.acc_train = accuracy(pred.labels, labels, split.train);
    row.acc_val = accuracy(pred.labels, labels, split.val);
    row.acc_test = accuracy(pred.labels, labels, split.test);
    row.alpha = alpha_values(eval_pass);
    if (masked) row.mask_acc = masking_accuracy(masks, real_masks);
    if (observer) observer(epoch, masks, pred);

    if (row.acc_val > result.best_val) {
      result.best_val = row.acc_val;
      result.best_val_history.push_back(row.acc_val);
      result.best_epoch = epoch;
      result.best_params = params;
      result.best_masks = masks;
      result.test_acc = row.acc_test;
      bad_epochs = 0;
      if (masked) {
        LabelVec source = pred.labels;
        if (tcfg.nh_label_source == NhLabelSource::kTrainTruthPlusPredicted) {
          for (NodeId i : split.train) source.y[i] = labels.y[i];
        }
        nh = nh_update(hood, source);
        result.nh_history.push_back({epoch, nh});
        masks_stale = true;
        row.nh_updated = true;
      }
    } else {
      ++bad_epochs;
    }
    row.seconds = std::chrono::duration<double>(Clock::now() - epoch_start).count();
    result.log.push_back(std::move(row));
    if (bad_epochs >= tcfg.patience) break;
  }

  result.final_nh = masked ? nh : NhVector{};
  if (masked) {
    const MaskPair final_masks = make_masks(nh, mcfg.threshold());
    const Prediction p = evaluate(g, x, result.best_params, &final_masks, mcfg);
    result.test_acc_final_masks = accuracy(p.labels, labels, split.test);
  } else {
    result.test_acc_final_masks = result.test_acc;
  }
  result.total_seconds = std::chrono::duration<double>(Clock::now() - run_start).count();
  return result;
}

std::pair<double, double> mean_and_sample_std(std::vector<double> values) {
  if (values.empty()) return {0.0, 0.0};
  std::sort(values.begin(), values.end());
  if (values.front() == values.back()) return {values.front(), 0.0};
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

MultiSeedResult multi_seed(const Graph& g, const Tensor& x, const LabelVec& labels,
                           const ModelConfig& mcfg, const TrainConfig& base,
                           std::span<const std::uint64_t> seeds, std::size_t threads) {
  if (seeds.size() < 2) throw InputError("multi_seed needs at least two seeds");
  mcfg.validate();
  base.validate();
  MultiSeedResult out;
  out.runs.resize(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      SeedOutcome& o = out.runs[i];
      o.seed = seeds[i];
      TrainConfig tcfg = base;
      tcfg.seed = seeds[i];
      try {
        const Split split = make_split(g.num_nodes(), labels, seeds[i], tcfg.ratios);
        o.result = train_run(g, x, labels, split, mcfg, tcfg);
        o.test_acc = o.result.test_acc;
        o.best_epoch = o.result.best_epoch;
        o.ok = true;
      } catch (const DivergenceError& e) {
        o.error = e.what();
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, seeds.size());
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> accs;
  for (const SeedOutcome& o : out.runs) {
    if (o.ok) {
      accs.push_back(o.test_acc);
    } else {
      ++out.excluded;
      std::cerr << "warning: seed " << o.seed << " excluded: " << o.error << "\n";
    }
  }
  std::tie(out.mean, out.stddev) = mean_and_sample_std(accs);
  return out;
}

}  // namespace nhg
