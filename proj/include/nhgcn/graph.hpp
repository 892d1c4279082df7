#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace nhg {

using NodeId = std::uint32_t;

/// Immutable undirected simple graph in compressed-row form.
///
/// Each undirected edge {u, v} is stored twice (row u and row v); neighbor
/// lists are sorted and duplicate free, and self-loops are never stored.
class Graph {
 public:
  Graph() = default;

  std::size_t num_nodes() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  /// Number of undirected edges.
  std::size_t num_edges() const { return col_idx_.size() / 2; }
  std::size_t degree(NodeId v) const { return row_ptr_[v + 1] - row_ptr_[v]; }
  std::span<const NodeId> neighbors(NodeId v) const {
    return {col_idx_.data() + row_ptr_[v], degree(v)};
  }
  std::vector<std::size_t> degrees() const;

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const NodeId> col_idx() const { return col_idx_; }

  /// Undirected edge list with u < v, sorted.
  std::vector<std::pair<NodeId, NodeId>> edge_list() const;

  /// Number of self-loops dropped when the graph was built.
  std::size_t dropped_self_loops() const { return dropped_self_loops_; }

  friend Graph build_graph(std::span<const std::pair<NodeId, NodeId>> edges, std::size_t n);

 private:
  std::vector<std::size_t> row_ptr_;
  std::vector<NodeId> col_idx_;
  std::size_t dropped_self_loops_ = 0;
};

/// Symmetrizes and deduplicates `edges`; self-loops are dropped and counted.
/// Throws InputError for ids >= n.
Graph build_graph(std::span<const std::pair<NodeId, NodeId>> edges, std::size_t n);

/// Real-valued CSR matrix. Column indices are sorted within each row.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<NodeId> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
  /// Entry lookup by binary search; 0 for structural zeros.
  double at(std::size_t r, std::size_t c) const;
  std::vector<double> to_dense() const;
};

/// Symmetrically normalized adjacency.
struct NormAdj {
  SparseMatrix matrix;
  bool self_loop = false;
};

/// D^-1/2 A D^-1/2, or (D+I)^-1/2 (A+I) (D+I)^-1/2 when `self_loop` is set.
/// Zero-degree rows stay empty in the first variant.
NormAdj normalize_adjacency(const Graph& g, bool self_loop);

/// Diagonal 0/1 matrix stored as one byte per node.
using DiagMask = std::vector<std::uint8_t>;

enum class MaskSide { kTarget, kSource };

/// M * norm(A) (target: rows zeroed) or norm(A) * M (source: columns zeroed).
/// Masked entries are removed from the pattern.
SparseMatrix apply_mask(const NormAdj& na, const DiagMask& mask, MaskSide side);

/// Literal norm(M (A [+ I])) / norm((A [+ I]) M): the mask is applied to the
/// raw adjacency and the result is normalized with its own row sums and
/// column sums, d_r^-1/2 (MA) d_c^-1/2. Zero sums produce zero rows/columns.
SparseMatrix masked_renormalized(const Graph& g, bool self_loop, const DiagMask& mask,
                                 MaskSide side);

/// Per-node k-hop neighborhoods N(i, k) = { v : 1 <= dist(i, v) <= k }.
class KHopIndex {
 public:
  KHopIndex() = default;
  KHopIndex(std::size_t k, std::vector<std::size_t> offsets, std::vector<NodeId> members)
      : k_(k), offsets_(std::move(offsets)), members_(std::move(members)) {}

  std::size_t k() const { return k_; }
  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  /// Sorted ids of the k-hop neighborhood of v, v itself excluded.
  std::span<const NodeId> neighborhood(NodeId v) const {
    return {members_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

 private:
  std::size_t k_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> members_;
};

/// Depth-limited BFS from every node. Throws InputError if k == 0.
KHopIndex khop_index(const Graph& g, std::size_t k);

}  // namespace nhg
