#include <gtest/gtest.h>

#include <random>

#include "nhgcn/error.hpp"
#include "nhgcn/graph.hpp"
#include "oracles.hpp"

using namespace nhg;

namespace {

Graph path3() {
  const oracle::Edges e{{0, 1}, {1, 2}};
  return build_graph(e, 3);
}

std::vector<NodeId> hood(const KHopIndex& idx, NodeId v) {
  auto s = idx.neighborhood(v);
  return {s.begin(), s.end()};
}

}  // namespace

TEST(BuildGraph, DeduplicatesAndSymmetrizes) {
  const oracle::Edges e{{0, 1}, {1, 0}, {1, 2}};
  const Graph g = build_graph(e, 3);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.degrees(), (std::vector<std::size_t>{1, 2, 1}));
  EXPECT_EQ(g.edge_list(), (oracle::Edges{{0, 1}, {1, 2}}));
}

TEST(BuildGraph, SingleIsolatedNode) {
  const Graph g = build_graph({}, 1);
  EXPECT_EQ(g.num_nodes(), 1u);
  EXPECT_EQ(g.degree(0), 0u);
}

TEST(BuildGraph, DropsSelfLoops) {
  const oracle::Edges e{{0, 0}, {0, 1}};
  const Graph g = build_graph(e, 2);
  EXPECT_EQ(g.edge_list(), (oracle::Edges{{0, 1}}));
  EXPECT_EQ(g.dropped_self_loops(), 1u);
}

TEST(BuildGraph, RejectsOutOfRangeIds) {
  const oracle::Edges e{{0, 3}};
  EXPECT_THROW(build_graph(e, 3), InputError);
}

TEST(BuildGraph, DegreeMatchesRowLengthOnRandomGraphs) {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 5 + t;
    const Graph g = build_graph(oracle::random_edges(n, 0.3, gen), n);
    for (NodeId v = 0; v < n; ++v) {
      EXPECT_EQ(g.degree(v), g.neighbors(v).size());
      for (NodeId u : g.neighbors(v)) {
        EXPECT_NE(u, v);
        auto nb = g.neighbors(u);
        EXPECT_TRUE(std::find(nb.begin(), nb.end(), v) != nb.end());
      }
    }
  }
}

TEST(Normalize, SingleEdgeNoSelfLoop) {
  const oracle::Edges e{{0, 1}};
  const NormAdj na = normalize_adjacency(build_graph(e, 2), false);
  EXPECT_DOUBLE_EQ(na.matrix.at(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(na.matrix.at(1, 0), 1.0);
  EXPECT_EQ(na.matrix.at(0, 0), 0.0);
}

TEST(Normalize, IsolatedNodeWithSelfLoop) {
  const NormAdj na = normalize_adjacency(build_graph({}, 1), true);
  EXPECT_DOUBLE_EQ(na.matrix.at(0, 0), 1.0);
}

TEST(Normalize, IsolatedNodeWithoutSelfLoopIsZeroRow) {
  const NormAdj na = normalize_adjacency(build_graph({}, 2), false);
  EXPECT_EQ(na.matrix.nnz(), 0u);
}

TEST(Normalize, SingleEdgeWithSelfLoopAllHalf) {
  const oracle::Edges e{{0, 1}};
  const NormAdj na = normalize_adjacency(build_graph(e, 2), true);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) EXPECT_DOUBLE_EQ(na.matrix.at(r, c), 0.5);
  }
}

TEST(Normalize, MatchesDenseOracleSymmetricAndBounded) {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 3 + t % 17;
    const auto edges = oracle::random_edges(n, 0.25, gen);
    const Graph g = build_graph(edges, n);
    for (bool self_loop : {false, true}) {
      const NormAdj na = normalize_adjacency(g, self_loop);
      const auto ref = oracle::dense_normalized(n, edges, self_loop);
      for (std::size_t i = 0; i < n; ++i) {
        if (self_loop) EXPECT_GT(na.matrix.at(i, i), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
          EXPECT_NEAR(na.matrix.at(i, j), ref[i][j], 1e-15);
          EXPECT_EQ(na.matrix.at(i, j), na.matrix.at(j, i));
        }
      }
      for (double w : na.matrix.values) {
        EXPECT_GT(w, 0.0);
        EXPECT_LE(w, 1.0);
      }
    }
  }
}

TEST(KHop, PathNeighborhoods) {
  const Graph g = path3();
  EXPECT_EQ(hood(khop_index(g, 2), 0), (std::vector<NodeId>{1, 2}));
  EXPECT_EQ(hood(khop_index(g, 1), 0), (std::vector<NodeId>{1}));
}

TEST(KHop, FourCycleTwoHops) {
  const oracle::Edges e{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  EXPECT_EQ(hood(khop_index(build_graph(e, 4), 2), 0), (std::vector<NodeId>{1, 2, 3}));
}

TEST(KHop, ZeroHopRejected) { EXPECT_THROW(khop_index(path3(), 0), InputError); }

TEST(KHop, IsolatedNodeHasEmptyNeighborhood) {
  const oracle::Edges e{{0, 1}};
  EXPECT_TRUE(khop_index(build_graph(e, 3), 3).neighborhood(2).empty());
}

TEST(KHop, MatchesAllPairsShortestPathOracle) {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + gen() % 49;
    const double p = 0.5 * std::uniform_real_distribution<double>(0.0, 1.0)(gen) * 4.0 / n;
    const auto edges = oracle::random_edges(n, std::min(1.0, p), gen);
    const auto d = oracle::hop_distances(n, edges);
    const Graph g = build_graph(edges, n);
    for (std::size_t k = 1; k <= 3; ++k) {
      const KHopIndex idx = khop_index(g, k);
      const KHopIndex prev = k > 1 ? khop_index(g, k - 1) : KHopIndex{};
      for (NodeId i = 0; i < n; ++i) {
        std::vector<NodeId> expect;
        for (NodeId j = 0; j < n; ++j) {
          if (j != i && d[i][j] <= k) expect.push_back(j);
        }
        ASSERT_EQ(hood(idx, i), expect);
        if (k > 1) {
          for (NodeId j : prev.neighborhood(i)) {
            EXPECT_TRUE(std::binary_search(expect.begin(), expect.end(), j));
          }
        }
      }
    }
  }
}

TEST(ApplyMask, AllOnesIsIdentityAllZerosAnnihilates) {
  std::mt19937_64 gen(5);
  const std::size_t n = 9;
  const Graph g = build_graph(oracle::random_edges(n, 0.4, gen), n);
  const NormAdj na = normalize_adjacency(g, true);
  for (MaskSide side : {MaskSide::kTarget, MaskSide::kSource}) {
    EXPECT_EQ(apply_mask(na, DiagMask(n, 1), side).to_dense(), na.matrix.to_dense());
    EXPECT_EQ(apply_mask(na, DiagMask(n, 0), side).nnz(), 0u);
  }
}

TEST(ApplyMask, K2TargetMaskZeroesRow) {
  const oracle::Edges e{{0, 1}};
  const NormAdj na = normalize_adjacency(build_graph(e, 2), true);
  const SparseMatrix m = apply_mask(na, DiagMask{1, 0}, MaskSide::kTarget);
  EXPECT_DOUBLE_EQ(m.at(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(m.at(0, 1), 0.5);
  EXPECT_EQ(m.at(1, 0), 0.0);
  EXPECT_EQ(m.at(1, 1), 0.0);
}

TEST(ApplyMask, LengthMismatchRejected) {
  const NormAdj na = normalize_adjacency(path3(), false);
  EXPECT_THROW(apply_mask(na, DiagMask(2, 1), MaskSide::kTarget), ShapeError);
}

TEST(ApplyMask, ComplementaryMasksReconstructOperator) {
  std::mt19937_64 gen(17);
  for (int t = 0; t < 25; ++t) {
    const std::size_t n = 4 + t;
    const Graph g = build_graph(oracle::random_edges(n, 0.3, gen), n);
    DiagMask low(n), high(n);
    for (std::size_t i = 0; i < n; ++i) {
      low[i] = gen() % 2;
      high[i] = 1 - low[i];
    }
    for (bool self_loop : {false, true}) {
      const NormAdj na = normalize_adjacency(g, self_loop);
      const auto full = na.matrix.to_dense();
      for (MaskSide side : {MaskSide::kTarget, MaskSide::kSource}) {
        const auto a = apply_mask(na, low, side).to_dense();
        const auto b = apply_mask(na, high, side).to_dense();
        for (std::size_t i = 0; i < full.size(); ++i) EXPECT_EQ(a[i] + b[i], full[i]);
      }
    }
  }
}

TEST(ApplyMask, RenormalizedVariantMatchesDenseOracle) {
  std::mt19937_64 gen(23);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 4 + t % 10;
    const auto edges = oracle::random_edges(n, 0.4, gen);
    const Graph g = build_graph(edges, n);
    DiagMask mask(n);
    for (auto& b : mask) b = gen() % 2;
    for (bool self_loop : {false, true}) {
      for (MaskSide side : {MaskSide::kTarget, MaskSide::kSource}) {
        // Dense norm(M A) with row sums on the left and column sums on the right.
        auto a = oracle::adjacency_matrix(n, edges);
        std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            double v = a[i][j] + ((self_loop && i == j) ? 1 : 0);
            if (side == MaskSide::kTarget && !mask[i]) v = 0;
            if (side == MaskSide::kSource && !mask[j]) v = 0;
            m[i][j] = v;
          }
        }
        std::vector<double> rs(n, 0.0), cs(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            rs[i] += m[i][j];
            cs[j] += m[i][j];
          }
        }
        const SparseMatrix got = masked_renormalized(g, self_loop, mask, side);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            const double want = m[i][j] == 0.0 ? 0.0 : m[i][j] / std::sqrt(rs[i] * cs[j]);
            EXPECT_NEAR(got.at(i, j), want, 1e-15);
          }
        }
      }
    }
  }
}
