#include "nhgcn/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "nhgcn/error.hpp"
#include "nhgcn/rng.hpp"

namespace nhg {

Tape::Node& Tape::node(Var v) {
  if (!v.valid() || v.id >= nodes_.size()) throw StateError("variable does not belong to this tape");
  return nodes_[v.id];
}

const Tape::Node& Tape::node(Var v) const {
  if (!v.valid() || v.id >= nodes_.size()) throw StateError("variable does not belong to this tape");
  return nodes_[v.id];
}

Var Tape::push(Tensor value, bool requires_grad, std::function<void(Tape&, std::size_t)> backward) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  backward_done_ = false;
  return Var{nodes_.size() - 1};
}

void Tape::accumulate(Var v, const Tensor& g) {
  Node& n = node(v);
  if (!n.requires_grad) return;
  if (!n.has_grad) {
    n.grad = g;
    n.has_grad = true;
    return;
  }
  for (std::size_t i = 0; i < g.size(); ++i) n.grad.data[i] += g.data[i];
}

void Tape::accumulate(Var v, Tensor&& g) {
  Node& n = node(v);
  if (!n.requires_grad) return;
  if (!n.has_grad) {
    n.grad = std::move(g);
    n.has_grad = true;
    return;
  }
  for (std::size_t i = 0; i < g.size(); ++i) n.grad.data[i] += g.data[i];
}

Var Tape::constant(Tensor value) {
  require_finite(value, "constant");
  return push(std::move(value), false, nullptr);
}

Var Tape::parameter(const std::string& name, const Tensor& value) {
  if (find_parameter(name).valid()) throw StateError("parameter '" + name + "' recorded twice");
  require_finite(value, name.c_str());
  Var v = push(value, true, nullptr);
  params_.emplace_back(name, v);
  return v;
}

Var Tape::find_parameter(const std::string& name) const {
  for (const auto& [n, v] : params_) {
    if (n == name) return v;
  }
  return Var{};
}

const Tensor& Tape::value(Var v) const { return node(v).value; }

bool Tape::requires_grad(Var v) const { return node(v).requires_grad; }

Var Tape::matmul(Var a, Var b) {
  Tensor out = nhg::matmul(value(a), value(b));
  const bool rg = requires_grad(a) || requires_grad(b);
  return push(std::move(out), rg, [a, b](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    if (t.requires_grad(a)) t.accumulate(a, matmul_nt(g, t.value(b)));
    if (t.requires_grad(b)) t.accumulate(b, matmul_tn(t.value(a), g));
  });
}

Var Tape::spmm(std::shared_ptr<const SparseMatrix> op, Var x) {
  Tensor out = nhg::spmm(*op, value(x));
  return push(std::move(out), requires_grad(x), [op, x](Tape& t, std::size_t self) {
    t.accumulate(x, spmm_transposed(*op, t.nodes_[self].grad));
  });
}

Var Tape::relu(Var x) {
  return push(nhg::relu(value(x)), requires_grad(x), [x](Tape& t, std::size_t self) {
    const Tensor& in = t.value(x);
    Tensor g = t.nodes_[self].grad;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(in.data[i] > 0.0)) g.data[i] = 0.0;
    }
    t.accumulate(x, std::move(g));
  });
}

Var Tape::tanh(Var x) {
  return push(nhg::tanh(value(x)), requires_grad(x), [x](Tape& t, std::size_t self) {
    const Tensor& y = t.nodes_[self].value;
    Tensor g = t.nodes_[self].grad;
    for (std::size_t i = 0; i < g.size(); ++i) g.data[i] *= 1.0 - y.data[i] * y.data[i];
    t.accumulate(x, std::move(g));
  });
}

Var Tape::dropout(Var x, double p, bool training, Rng& rng) {
  auto keep = std::make_shared<std::vector<std::uint8_t>>();
  Tensor out = nhg::dropout(value(x), p, training, rng, keep.get());
  const double scale = training ? 1.0 / (1.0 - p) : 1.0;
  return push(std::move(out), requires_grad(x), [x, keep, scale](Tape& t, std::size_t self) {
    Tensor g = t.nodes_[self].grad;
    for (std::size_t i = 0; i < g.size(); ++i) g.data[i] = (*keep)[i] ? g.data[i] * scale : 0.0;
    t.accumulate(x, std::move(g));
  });
}

Var Tape::add(std::span<const Var> xs) {
  if (xs.empty()) throw ShapeError("add: no operands");
  Tensor out = value(xs[0]);
  bool rg = requires_grad(xs[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const Tensor& v = value(xs[i]);
    require_same_shape(out, v, "add");
    for (std::size_t j = 0; j < out.size(); ++j) out.data[j] += v.data[j];
    rg = rg || requires_grad(xs[i]);
  }
  std::vector<Var> ins(xs.begin(), xs.end());
  return push(std::move(out), rg, [ins](Tape& t, std::size_t self) {
    for (Var v : ins) t.accumulate(v, t.nodes_[self].grad);
  });
}

Var Tape::scale_by(Var x, Var weights, std::size_t component) {
  const Tensor& w = value(weights);
  if (w.rows != 1 || component >= w.cols) throw ShapeError("scale_by: weight component out of range");
  const double s = w.data[component];
  Tensor out = value(x);
  for (double& v : out.data) v *= s;
  const bool rg = requires_grad(x) || requires_grad(weights);
  return push(std::move(out), rg, [x, weights, component](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    const Tensor& in = t.value(x);
    if (t.requires_grad(x)) {
      Tensor gx = g;
      const double s = t.value(weights).data[component];
      for (double& v : gx.data) v *= s;
      t.accumulate(x, std::move(gx));
    }
    if (t.requires_grad(weights)) {
      double dot = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) dot += g.data[i] * in.data[i];
      Tensor gw(1, t.value(weights).cols);
      gw.data[component] = dot;
      t.accumulate(weights, std::move(gw));
    }
  });
}

Var Tape::scale(Var x, double factor) {
  Tensor out = value(x);
  for (double& v : out.data) v *= factor;
  return push(std::move(out), requires_grad(x), [x, factor](Tape& t, std::size_t self) {
    Tensor g = t.nodes_[self].grad;
    for (double& v : g.data) v *= factor;
    t.accumulate(x, std::move(g));
  });
}

Var Tape::max(std::span<const Var> xs) {
  if (xs.empty()) throw ShapeError("max: no operands");
  Tensor out = value(xs[0]);
  auto winner = std::make_shared<std::vector<std::uint8_t>>(out.size(), 0);
  bool rg = requires_grad(xs[0]);
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const Tensor& v = value(xs[k]);
    require_same_shape(out, v, "max");
    for (std::size_t i = 0; i < out.size(); ++i) {
      // Strict comparison: ties keep the earliest operand.
      if (v.data[i] > out.data[i]) {
        out.data[i] = v.data[i];
        (*winner)[i] = static_cast<std::uint8_t>(k);
      }
    }
    rg = rg || requires_grad(xs[k]);
  }
  std::vector<Var> ins(xs.begin(), xs.end());
  return push(std::move(out), rg, [ins, winner](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    for (std::size_t k = 0; k < ins.size(); ++k) {
      if (!t.requires_grad(ins[k])) continue;
      Tensor gk(g.rows, g.cols);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if ((*winner)[i] == k) gk.data[i] = g.data[i];
      }
      t.accumulate(ins[k], std::move(gk));
    }
  });
}

Var Tape::concat_cols(std::span<const Var> xs) {
  std::vector<Tensor> parts;
  parts.reserve(xs.size());
  bool rg = false;
  for (Var v : xs) {
    parts.push_back(value(v));
    rg = rg || requires_grad(v);
  }
  Tensor out = nhg::concat_cols(parts);
  std::vector<Var> ins(xs.begin(), xs.end());
  return push(std::move(out), rg, [ins](Tape& t, std::size_t self) {
    const Tensor& g = t.nodes_[self].grad;
    std::size_t offset = 0;
    for (Var v : ins) {
      const std::size_t w = t.value(v).cols;
      if (t.requires_grad(v)) {
        Tensor gv(g.rows, w);
        for (std::size_t i = 0; i < g.rows; ++i) {
          for (std::size_t j = 0; j < w; ++j) gv(i, j) = g(i, offset + j);
        }
        t.accumulate(v, std::move(gv));
      }
      offset += w;
    }
  });
}

Var Tape::softmax(Var x) {
  return push(row_softmax(value(x)), requires_grad(x), [x](Tape& t, std::size_t self) {
    const Tensor& y = t.nodes_[self].value;
    Tensor g = t.nodes_[self].grad;
    for (std::size_t i = 0; i < g.rows; ++i) {
      auto gr = g.row(i);
      auto yr = y.row(i);
      double dot = 0.0;
      for (std::size_t j = 0; j < gr.size(); ++j) dot += gr[j] * yr[j];
      for (std::size_t j = 0; j < gr.size(); ++j) gr[j] = yr[j] * (gr[j] - dot);
    }
    t.accumulate(x, std::move(g));
  });
}

Var Tape::nll(Var probs, std::span<const NodeId> nodes, std::span<const std::uint32_t> labels,
              double floor) {
  const Tensor& p = value(probs);
  if (labels.size() != p.rows) throw ShapeError("nll: label count does not match prediction rows");
  double loss = 0.0;
  for (NodeId i : nodes) {
    if (i >= p.rows || labels[i] >= p.cols) throw ShapeError("nll: node or label out of range");
    loss -= std::log(std::max(p(i, labels[i]), floor));
  }
  if (!std::isfinite(loss)) throw DivergenceError("non-finite loss");
  std::vector<NodeId> idx(nodes.begin(), nodes.end());
  std::vector<std::uint32_t> lab(labels.begin(), labels.end());
  return push(Tensor(1, 1, loss), requires_grad(probs),
              [probs, idx = std::move(idx), lab = std::move(lab), floor](Tape& t, std::size_t self) {
                const double up = t.nodes_[self].grad.data[0];
                const Tensor& pv = t.value(probs);
                Tensor g(pv.rows, pv.cols);
                for (NodeId i : idx) {
                  const double q = pv(i, lab[i]);
                  if (q >= floor) g(i, lab[i]) -= up / q;
                }
                t.accumulate(probs, std::move(g));
              });
}

void Tape::backward(Var loss) {
  if (nodes_.empty()) throw StateError("backward called before any forward pass was recorded");
  Node& root = node(loss);
  if (root.value.rows != 1 || root.value.cols != 1) throw StateError("backward requires a scalar loss");
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor();
  }
  if (root.requires_grad) {
    root.grad = Tensor(1, 1, 1.0);
    root.has_grad = true;
  }
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.has_grad || !n.backward) continue;
    // The closure may grow other nodes' grads but never this one.
    n.backward(*this, i);
  }
  backward_done_ = true;
}

Tensor Tape::grad(Var v) const {
  if (!backward_done_) throw StateError("gradient requested before backward");
  const Node& n = node(v);
  if (!n.has_grad) return Tensor(n.value.rows, n.value.cols);
  return n.grad;
}

}  // namespace nhg
