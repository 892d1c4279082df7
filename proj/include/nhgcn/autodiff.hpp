#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nhgcn/graph.hpp"
#include "nhgcn/tensor.hpp"

namespace nhg {

class Rng;

/// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = std::numeric_limits<std::size_t>::max();
  bool valid() const { return id != std::numeric_limits<std::size_t>::max(); }
};

/// Reverse-mode tape over the matrix operations used by the models.
///
/// Nodes are appended in evaluation order, so walking the tape backwards is
/// a valid topological order. Constants carry no gradient and their inputs
/// are never differentiated; a parameter leaf appears once per name and all
/// its uses accumulate into the same gradient.
class Tape {
 public:
  Var constant(Tensor value);
  Var parameter(const std::string& name, const Tensor& value);

  Var matmul(Var a, Var b);
  /// op * x for a fixed sparse operator.
  Var spmm(std::shared_ptr<const SparseMatrix> op, Var x);
  Var relu(Var x);
  Var tanh(Var x);
  /// Mask drawn from `rng` at record time and replayed in backward.
  Var dropout(Var x, double p, bool training, Rng& rng);
  Var add(std::span<const Var> xs);
  /// weights(0, component) * x, with `weights` a 1xk row.
  Var scale_by(Var x, Var weights, std::size_t component);
  Var scale(Var x, double factor);
  Var max(std::span<const Var> xs);
  Var concat_cols(std::span<const Var> xs);
  /// Row-wise softmax; applied to a 1xk row it maps logits onto the simplex.
  Var softmax(Var x);
  /// -sum_{i in nodes} log max(P[i, labels[i]], floor), a 1x1 value.
  Var nll(Var probs, std::span<const NodeId> nodes, std::span<const std::uint32_t> labels,
          double floor);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const;

  /// Seeds d(loss)/d(loss) = 1 and propagates. `loss` must be 1x1.
  void backward(Var loss);
  /// Gradient of the last backward pass w.r.t. v (zeros if v did not
  /// influence the loss). Throws StateError before backward.
  Tensor grad(Var v) const;

  /// Parameter leaves in registration order.
  const std::vector<std::pair<std::string, Var>>& parameters() const { return params_; }
  Var find_parameter(const std::string& name) const;
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool has_grad = false;
    std::function<void(Tape&, std::size_t)> backward;
  };

  Var push(Tensor value, bool requires_grad, std::function<void(Tape&, std::size_t)> backward);
  Node& node(Var v);
  const Node& node(Var v) const;
  /// grad[v] += g, skipped for nodes that need no gradient.
  void accumulate(Var v, const Tensor& g);
  void accumulate(Var v, Tensor&& g);

  std::vector<Node> nodes_;
  std::vector<std::pair<std::string, Var>> params_;
  bool backward_done_ = false;
};

}  // namespace nhg
