#include "nhgcn/model.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nhgcn/error.hpp"
#include "nhgcn/rng.hpp"

namespace nhg {

std::string to_string(Arch a) {
  switch (a) {
    case Arch::kNhgcn: return "nhgcn";
    case Arch::kNhgcnSs: return "nhgcn_ss";
    case Arch::kGcn: return "gcn";
    case Arch::kMlp: return "mlp";
    case Arch::kGcnPlusX: return "gcn_plus_x";
  }
  return "?";
}

std::string to_string(Activation a) { return a == Activation::kRelu ? "relu" : "tanh"; }

std::string to_string(Combiner c) {
  switch (c) {
    case Combiner::kAdd: return "add";
    case Combiner::kConcatenate: return "concatenate";
    case Combiner::kMaxpooling: return "maxpooling";
  }
  return "?";
}

Arch parse_arch(const std::string& s) {
  for (Arch a : {Arch::kNhgcn, Arch::kNhgcnSs, Arch::kGcn, Arch::kMlp, Arch::kGcnPlusX}) {
    if (to_string(a) == s) return a;
  }
  throw ConfigError("unknown arch '" + s + "' (nhgcn, nhgcn_ss, gcn, mlp, gcn_plus_x)");
}

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation '" + s + "' (relu, tanh)");
}

Combiner parse_combiner(const std::string& s) {
  for (Combiner c : {Combiner::kAdd, Combiner::kConcatenate, Combiner::kMaxpooling}) {
    if (to_string(c) == s) return c;
  }
  throw ConfigError("unknown combiner '" + s + "' (add, concatenate, maxpooling)");
}

std::size_t ModelConfig::num_channels() const {
  switch (arch) {
    case Arch::kNhgcn:
    case Arch::kNhgcnSs: return 3;
    case Arch::kGcnPlusX: return 2;
    default: return 0;
  }
}

void ModelConfig::validate() const {
  if (in_features == 0) throw ConfigError("in_features must be positive");
  if (hidden == 0) throw ConfigError("hidden must be positive");
  if (num_classes < 2) throw ConfigError("num_classes must be >= 2");
  if (!(dropout_agg >= 0.0 && dropout_agg < 1.0)) throw ConfigError("dropout_agg must lie in [0, 1)");
  if (!(dropout_comb >= 0.0 && dropout_comb < 1.0)) throw ConfigError("dropout_comb must lie in [0, 1)");
  if (hop == 0) throw ConfigError("hop must be >= 1");
  if (!(inv_threshold >= 1.0)) throw ConfigError("inv_threshold must be >= 1 (T <= 1)");
}

namespace {

bool shared(const ModelConfig& cfg) { return cfg.share_weights; }

std::string w1_name(const ModelConfig& cfg, const char* channel) {
  return shared(cfg) ? "W1" : std::string("W1_") + channel;
}

std::string w2_name(const ModelConfig& cfg, const char* channel) {
  return shared(cfg) ? "W2" : std::string("W2_") + channel;
}

}  // namespace

ParamSet init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const std::size_t f = cfg.in_features;
  const std::size_t h = cfg.hidden;
  const std::size_t c = cfg.num_classes;
  ParamSet p;
  switch (cfg.arch) {
    case Arch::kNhgcn:
    case Arch::kNhgcnSs: {
      if (shared(cfg)) {
        p.add("W1", glorot_uniform(f, h, rng));
        p.add("W2", glorot_uniform(h, h, rng));
      } else {
        p.add("W1_low", glorot_uniform(f, h, rng));
        p.add("W1_high", glorot_uniform(f, h, rng));
        p.add("W2_low", glorot_uniform(h, h, rng));
        p.add("W2_high", glorot_uniform(h, h, rng));
      }
      p.add("W_x", glorot_uniform(f, h, rng));
      const std::size_t out_in = cfg.combiner == Combiner::kConcatenate ? 3 * h : h;
      p.add("W_o", glorot_uniform(out_in, c, rng));
      if (cfg.combiner != Combiner::kMaxpooling) p.add("alpha", Tensor(1, 3));
      break;
    }
    case Arch::kGcnPlusX: {
      p.add("W1", glorot_uniform(f, h, rng));
      p.add("W2", glorot_uniform(h, h, rng));
      p.add("W_x", glorot_uniform(f, h, rng));
      const std::size_t out_in = cfg.combiner == Combiner::kConcatenate ? 2 * h : h;
      p.add("W_o", glorot_uniform(out_in, c, rng));
      if (cfg.combiner != Combiner::kMaxpooling) p.add("alpha", Tensor(1, 2));
      break;
    }
    case Arch::kGcn:
    case Arch::kMlp:
      p.add("W1", glorot_uniform(f, h, rng));
      p.add("W_o", glorot_uniform(h, c, rng));
      break;
  }
  return p;
}

Operators build_operators(const Graph& g, const NormAdj& norm, const MaskPair* masks,
                          const ModelConfig& cfg) {
  Operators ops;
  ops.full = std::make_shared<const SparseMatrix>(norm.matrix);
  if (!cfg.uses_masks()) return ops;
  if (!masks) throw StateError(to_string(cfg.arch) + " requires NH masks");
  if (masks->low.size() != g.num_nodes() || masks->high.size() != g.num_nodes()) {
    throw ShapeError("mask length does not match node count");
  }
  auto make = [&](const DiagMask& m, MaskSide side) {
    if (cfg.renormalize_after_mask) {
      return std::make_shared<const SparseMatrix>(masked_renormalized(g, norm.self_loop, m, side));
    }
    return std::make_shared<const SparseMatrix>(apply_mask(norm, m, side));
  };
  ops.low_target = make(masks->low, MaskSide::kTarget);
  ops.low_source = make(masks->low, MaskSide::kSource);
  ops.high_target = make(masks->high, MaskSide::kTarget);
  ops.high_source = make(masks->high, MaskSide::kSource);
  return ops;
}

namespace {

Var activate(Tape& t, Var x, Activation a) { return a == Activation::kRelu ? t.relu(x) : t.tanh(x); }

// Two propagation layers: act(op2 * drop(act(op1 * x W1)) W2).
Var graph_channel(Tape& t, Var x, Var w1, Var w2, const std::shared_ptr<const SparseMatrix>& op1,
                  const std::shared_ptr<const SparseMatrix>& op2, const ModelConfig& cfg, bool training,
                  Rng& rng) {
  Var h1 = activate(t, t.spmm(op1, t.matmul(x, w1)), cfg.activation);
  Var h1d = t.dropout(h1, cfg.dropout_agg, training, rng);
  return activate(t, t.spmm(op2, t.matmul(h1d, w2)), cfg.activation);
}

Var combine(Tape& t, std::span<const Var> channels, const ParamSet& params, const ModelConfig& cfg,
            Var& alpha_out) {
  if (cfg.combiner == Combiner::kMaxpooling) return t.max(channels);
  Var logits = t.parameter("alpha", params.get("alpha"));
  if (t.value(logits).cols != channels.size()) throw ShapeError("alpha size does not match channel count");
  Var alpha = t.softmax(logits);
  alpha_out = alpha;
  std::vector<Var> scaled;
  for (std::size_t i = 0; i < channels.size(); ++i) scaled.push_back(t.scale_by(channels[i], alpha, i));
  return cfg.combiner == Combiner::kAdd ? t.add(scaled) : t.concat_cols(scaled);
}

}  // namespace

ForwardPass forward(const ParamSet& params, const Tensor& x, const Operators& ops,
                    const ModelConfig& cfg, Mode mode, std::uint64_t seed) {
  if (x.cols != cfg.in_features) {
    throw ShapeError("feature matrix has " + std::to_string(x.cols) + " columns, config expects " +
                     std::to_string(cfg.in_features));
  }
  if (ops.full && ops.full->rows != x.rows) throw ShapeError("operator size does not match node count");
  const bool training = mode == Mode::kTrain;
  Rng rng(seed);
  ForwardPass pass;
  Tape& t = pass.tape;
  Var xin = t.constant(x);
  Var xd = t.dropout(xin, cfg.dropout_agg, training, rng);
  Var head;

  switch (cfg.arch) {
    case Arch::kNhgcn:
    case Arch::kNhgcnSs: {
      if (!ops.low_target) throw StateError("mask operators missing for " + to_string(cfg.arch));
      const bool ss = cfg.arch == Arch::kNhgcnSs;
      Var w1_low = t.parameter(w1_name(cfg, "low"), params.get(w1_name(cfg, "low")));
      Var w1_high = shared(cfg) ? w1_low : t.parameter("W1_high", params.get("W1_high"));
      Var w2_low = t.parameter(w2_name(cfg, "low"), params.get(w2_name(cfg, "low")));
      Var w2_high = shared(cfg) ? w2_low : t.parameter("W2_high", params.get("W2_high"));
      Var wx = t.parameter("W_x", params.get("W_x"));
      pass.h_low = graph_channel(t, xd, w1_low, w2_low, ss ? ops.low_source : ops.low_target,
                                 ops.low_source, cfg, training, rng);
      pass.h_high = graph_channel(t, xd, w1_high, w2_high, ss ? ops.high_source : ops.high_target,
                                  ops.high_source, cfg, training, rng);
      pass.h_x = t.matmul(xin, wx);
      const Var channels[] = {pass.h_low, pass.h_high, pass.h_x};
      pass.h_o = combine(t, channels, params, cfg, pass.alpha);
      Var hod = t.dropout(pass.h_o, cfg.dropout_comb, training, rng);
      head = t.matmul(hod, t.parameter("W_o", params.get("W_o")));
      break;
    }
    case Arch::kGcnPlusX: {
      Var w1 = t.parameter("W1", params.get("W1"));
      Var w2 = t.parameter("W2", params.get("W2"));
      Var wx = t.parameter("W_x", params.get("W_x"));
      pass.h_graph = graph_channel(t, xd, w1, w2, ops.full, ops.full, cfg, training, rng);
      pass.h_x = t.matmul(xin, wx);
      const Var channels[] = {pass.h_graph, pass.h_x};
      pass.h_o = combine(t, channels, params, cfg, pass.alpha);
      Var hod = t.dropout(pass.h_o, cfg.dropout_comb, training, rng);
      head = t.matmul(hod, t.parameter("W_o", params.get("W_o")));
      break;
    }
    case Arch::kGcn: {
      Var w1 = t.parameter("W1", params.get("W1"));
      Var wo = t.parameter("W_o", params.get("W_o"));
      Var h1 = activate(t, t.spmm(ops.full, t.matmul(xd, w1)), cfg.activation);
      pass.h_graph = h1;
      Var h1d = t.dropout(h1, cfg.dropout_agg, training, rng);
      head = t.spmm(ops.full, t.matmul(h1d, wo));
      break;
    }
    case Arch::kMlp: {
      Var w1 = t.parameter("W1", params.get("W1"));
      Var wo = t.parameter("W_o", params.get("W_o"));
      Var h1 = activate(t, t.matmul(xd, w1), cfg.activation);
      Var h1d = t.dropout(h1, cfg.dropout_agg, training, rng);
      head = t.matmul(h1d, wo);
      break;
    }
  }
  pass.logits = head;
  pass.probs = t.softmax(head);
  return pass;
}

LabelVec argmax_labels(const Tensor& probs, std::size_t num_classes) {
  LabelVec out;
  out.num_classes = num_classes;
  out.y.resize(probs.rows);
  for (std::size_t i = 0; i < probs.rows; ++i) {
    auto r = probs.row(i);
    out.y[i] = static_cast<std::uint32_t>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return out;
}

Prediction predict(const ForwardPass& pass, std::size_t num_classes) {
  Prediction p;
  p.probs = pass.tape.value(pass.probs);
  p.labels = argmax_labels(p.probs, num_classes);
  return p;
}

namespace {

Prediction run_forward(const ParamSet& params, const Tensor& x, const Graph& g, const MaskPair* masks,
                       const ModelConfig& cfg, Mode mode, std::uint64_t seed) {
  const NormAdj norm = normalize_adjacency(g, cfg.self_loop);
  const Operators ops = build_operators(g, norm, masks, cfg);
  return predict(forward(params, x, ops, cfg, mode, seed), cfg.num_classes);
}

}  // namespace

Prediction nhgcn_forward(const ParamSet& params, const Tensor& x, const Graph& g,
                         const MaskPair& masks, const ModelConfig& cfg, Mode mode,
                         std::uint64_t seed) {
  if (cfg.arch != Arch::kNhgcn) throw ConfigError("nhgcn_forward called with arch " + to_string(cfg.arch));
  return run_forward(params, x, g, &masks, cfg, mode, seed);
}

Prediction nhgcn_ss_forward(const ParamSet& params, const Tensor& x, const Graph& g,
                            const MaskPair& masks, const ModelConfig& cfg, Mode mode,
                            std::uint64_t seed) {
  if (cfg.arch != Arch::kNhgcnSs) {
    throw ConfigError("nhgcn_ss_forward called with arch " + to_string(cfg.arch));
  }
  return run_forward(params, x, g, &masks, cfg, mode, seed);
}

Prediction baseline_forward(const ParamSet& params, const Tensor& x, const Graph& g,
                            const ModelConfig& cfg, Mode mode, std::uint64_t seed) {
  if (cfg.uses_masks()) throw ConfigError("baseline_forward called with arch " + to_string(cfg.arch));
  return run_forward(params, x, g, nullptr, cfg, mode, seed);
}

Tensor one_hot_rows(const LabelVec& labels, std::span<const NodeId> nodes) {
  Tensor y(labels.size(), labels.num_classes);
  for (NodeId i : nodes) y(i, labels.y[i]) = 1.0;
  return y;
}

double loss_trace(const Tensor& probs, const Tensor& y_train) {
  require_same_shape(probs, y_train, "loss_trace");
  if (std::all_of(y_train.data.begin(), y_train.data.end(), [](double v) { return v == 0.0; })) {
    throw InputError("loss over an empty training set");
  }
  // trace(Y^T L) = sum_c sum_i Y[i,c] L[i,c].
  double tr = 0.0;
  for (std::size_t c = 0; c < probs.cols; ++c) {
    for (std::size_t i = 0; i < probs.rows; ++i) {
      tr += y_train(i, c) * std::log(std::max(probs(i, c), kProbFloor));
    }
  }
  return -tr;
}

double loss_nll(const Tensor& probs, const LabelVec& labels, std::span<const NodeId> train) {
  if (train.empty()) throw InputError("loss over an empty training set");
  if (labels.size() != probs.rows) throw ShapeError("label count does not match prediction rows");
  double loss = 0.0;
  for (NodeId i : train) loss -= std::log(std::max(probs(i, labels.y[i]), kProbFloor));
  return loss;
}

Var record_loss(ForwardPass& pass, const LabelVec& labels, std::span<const NodeId> train,
                bool average) {
  if (train.empty()) throw InputError("loss over an empty training set");
  Var l = pass.tape.nll(pass.probs, train, labels.y, kProbFloor);
  return average ? pass.tape.scale(l, 1.0 / static_cast<double>(train.size())) : l;
}

Gradients backprop(ForwardPass& pass, const ParamSet& params, Var loss) {
  pass.tape.backward(loss);
  Gradients g = params.zeros_like();
  for (auto& [name, tensor] : g) {
    Var v = pass.tape.find_parameter(name);
    if (v.valid()) tensor = pass.tape.grad(v);
  }
  return g;
}

}  // namespace nhg
