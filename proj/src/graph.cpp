#include "nhgcn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nhgcn/error.hpp"

namespace nhg {

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> d(num_nodes());
  for (std::size_t v = 0; v < d.size(); ++v) d[v] = degree(static_cast<NodeId>(v));
  return d;
}

std::vector<std::pair<NodeId, NodeId>> Graph::edge_list() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(num_edges());
  for (std::size_t u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(static_cast<NodeId>(u))) {
      if (u < v) out.emplace_back(static_cast<NodeId>(u), v);
    }
  }
  return out;
}

Graph build_graph(std::span<const std::pair<NodeId, NodeId>> edges, std::size_t n) {
  Graph g;
  std::vector<std::pair<NodeId, NodeId>> directed;
  directed.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) {
      throw InputError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                       ") references a node outside [0, " + std::to_string(n) + ")");
    }
    if (u == v) {
      ++g.dropped_self_loops_;
      continue;
    }
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  g.row_ptr_.assign(n + 1, 0);
  g.col_idx_.reserve(directed.size());
  for (auto [u, v] : directed) {
    ++g.row_ptr_[u + 1];
    g.col_idx_.push_back(v);
  }
  for (std::size_t i = 0; i < n; ++i) g.row_ptr_[i + 1] += g.row_ptr_[i];
  return g;
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
  auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
  auto it = std::lower_bound(first, last, static_cast<NodeId>(c));
  if (it == last || *it != c) return 0.0;
  return values[static_cast<std::size_t>(it - col_idx.begin())];
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> d(rows * cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) d[r * cols + col_idx[p]] = values[p];
  }
  return d;
}

namespace {

// Pattern of A (+ I) with unit weights.
SparseMatrix adjacency_pattern(const Graph& g, bool self_loop) {
  const std::size_t n = g.num_nodes();
  SparseMatrix m;
  m.rows = m.cols = n;
  m.row_ptr.assign(1, 0);
  m.row_ptr.reserve(n + 1);
  m.col_idx.reserve(2 * g.num_edges() + (self_loop ? n : 0));
  for (std::size_t i = 0; i < n; ++i) {
    bool diag_done = !self_loop;
    for (NodeId j : g.neighbors(static_cast<NodeId>(i))) {
      if (!diag_done && j > i) {
        m.col_idx.push_back(static_cast<NodeId>(i));
        diag_done = true;
      }
      m.col_idx.push_back(j);
    }
    if (!diag_done) m.col_idx.push_back(static_cast<NodeId>(i));
    m.row_ptr.push_back(m.col_idx.size());
  }
  m.values.assign(m.col_idx.size(), 1.0);
  return m;
}

}  // namespace

NormAdj normalize_adjacency(const Graph& g, bool self_loop) {
  NormAdj out;
  out.self_loop = self_loop;
  out.matrix = adjacency_pattern(g, self_loop);
  const std::size_t n = g.num_nodes();
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(g.degree(static_cast<NodeId>(i))) + (self_loop ? 1.0 : 0.0);
    inv_sqrt[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  SparseMatrix& m = out.matrix;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
      m.values[p] = inv_sqrt[i] * inv_sqrt[m.col_idx[p]];
    }
  }
  return out;
}

namespace {

SparseMatrix filter_by_mask(const SparseMatrix& in, const DiagMask& mask, MaskSide side) {
  if (mask.size() != in.rows || mask.size() != in.cols) {
    throw ShapeError("mask length " + std::to_string(mask.size()) + " does not match operator size " +
                     std::to_string(in.rows));
  }
  SparseMatrix out;
  out.rows = in.rows;
  out.cols = in.cols;
  out.row_ptr.assign(1, 0);
  out.row_ptr.reserve(in.rows + 1);
  for (std::size_t r = 0; r < in.rows; ++r) {
    if (side == MaskSide::kSource || mask[r]) {
      for (std::size_t p = in.row_ptr[r]; p < in.row_ptr[r + 1]; ++p) {
        const NodeId c = in.col_idx[p];
        if (side == MaskSide::kSource && !mask[c]) continue;
        out.col_idx.push_back(c);
        out.values.push_back(in.values[p]);
      }
    }
    out.row_ptr.push_back(out.col_idx.size());
  }
  return out;
}

}  // namespace

SparseMatrix apply_mask(const NormAdj& na, const DiagMask& mask, MaskSide side) {
  return filter_by_mask(na.matrix, mask, side);
}

SparseMatrix masked_renormalized(const Graph& g, bool self_loop, const DiagMask& mask,
                                 MaskSide side) {
  SparseMatrix m = filter_by_mask(adjacency_pattern(g, self_loop), mask, side);
  std::vector<double> row_sum(m.rows, 0.0), col_sum(m.cols, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) {
      row_sum[r] += m.values[p];
      col_sum[m.col_idx[p]] += m.values[p];
    }
  }
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) {
      // Both sums are >= 1 for any stored entry.
      m.values[p] /= std::sqrt(row_sum[r] * col_sum[m.col_idx[p]]);
    }
  }
  return m;
}

KHopIndex khop_index(const Graph& g, std::size_t k) {
  if (k == 0) throw InputError("hop count k must be >= 1");
  const std::size_t n = g.num_nodes();
  std::vector<std::size_t> offsets{0};
  offsets.reserve(n + 1);
  std::vector<NodeId> members;
  // stamp[v] == source + 1 marks v as visited from the current source.
  std::vector<std::size_t> stamp(n, 0);
  std::vector<NodeId> frontier, next;
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t begin = members.size();
    stamp[s] = s + 1;
    frontier.assign(1, static_cast<NodeId>(s));
    for (std::size_t depth = 0; depth < k && !frontier.empty(); ++depth) {
      next.clear();
      for (NodeId u : frontier) {
        for (NodeId v : g.neighbors(u)) {
          if (stamp[v] == s + 1) continue;
          stamp[v] = s + 1;
          next.push_back(v);
          members.push_back(v);
        }
      }
      frontier.swap(next);
    }
    std::sort(members.begin() + static_cast<std::ptrdiff_t>(begin), members.end());
    offsets.push_back(members.size());
  }
  return KHopIndex(k, std::move(offsets), std::move(members));
}

}  // namespace nhg
