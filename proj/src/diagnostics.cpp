#include "nhgcn/diagnostics.hpp"

#include <algorithm>

#include "nhgcn/rng.hpp"

namespace nhg {

TinyInstance tiny_instance(std::uint64_t seed) {
  constexpr std::size_t n = 12;
  constexpr std::size_t f = 5;
  constexpr std::size_t c = 3;
  Rng rng(mix_seed(seed, 0x71e7));
  std::vector<std::pair<NodeId, NodeId>> edges;
  // Nodes 10 and 11 stay isolated.
  for (NodeId u = 0; u < 10; ++u) {
    for (NodeId v = u + 1; v < 10; ++v) {
      if (rng.uniform() < 0.3) edges.emplace_back(u, v);
    }
  }
  TinyInstance t;
  t.data.name = "tiny";
  t.data.graph = build_graph(edges, n);
  t.data.features = Tensor(n, f);
  for (double& x : t.data.features.data) x = rng.normal();
  t.data.labels.num_classes = c;
  for (std::size_t i = 0; i < n; ++i) t.data.labels.y.push_back(static_cast<std::uint32_t>(rng.below(c)));

  LabelVec guess = t.data.labels;
  for (auto& y : guess.y) y = static_cast<std::uint32_t>(rng.below(c));
  t.masks = make_masks(nh_values(khop_index(t.data.graph, 1), guess), 0.6);
  for (NodeId i = 0; i < n; i += 2) t.train.push_back(i);
  return t;
}

GradCheckReport check_model_gradients(ModelConfig cfg, std::uint64_t seed, std::size_t probes) {
  const TinyInstance t = tiny_instance(seed);
  cfg.in_features = t.data.num_features();
  cfg.num_classes = t.data.num_classes();
  cfg.hidden = std::min<std::size_t>(cfg.hidden, 4);
  const NormAdj norm = normalize_adjacency(t.data.graph, cfg.self_loop);
  const Operators ops = build_operators(t.data.graph, norm, cfg.uses_masks() ? &t.masks : nullptr, cfg);
  const std::uint64_t dropout_seed = mix_seed(seed, 0xd40);

  ParamSet params = init_params(cfg, seed);
  // Start the combiner away from the symmetric point so its gradient is informative.
  if (params.contains("alpha")) {
    Rng rng(mix_seed(seed, 0xa1));
    for (double& a : params.get("alpha").data) a = rng.uniform(-0.5, 0.5);
  }
  const LossFn fn = [&](const ParamSet& p, Gradients* grads) {
    ForwardPass pass = forward(p, t.data.features, ops, cfg, Mode::kTrain, dropout_seed);
    const Var loss = record_loss(pass, t.data.labels, t.train, false);
    const double value = pass.tape.value(loss).data[0];
    if (grads) *grads = backprop(pass, p, loss);
    return value;
  };
  return grad_check(fn, params, probes, mix_seed(seed, 0x9c));
}

}  // namespace nhg
