// Independent reference implementations used by the tests. They favour
// obviousness over speed and share no code with the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "nhgcn/graph.hpp"
#include "nhgcn/metrics.hpp"
#include "nhgcn/tensor.hpp"

namespace oracle {

using Edges = std::vector<std::pair<nhg::NodeId, nhg::NodeId>>;

inline Edges random_edges(std::size_t n, double p, std::mt19937_64& gen) {
  std::bernoulli_distribution coin(p);
  Edges e;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(gen)) e.emplace_back(static_cast<nhg::NodeId>(i), static_cast<nhg::NodeId>(j));
    }
  }
  return e;
}

inline std::vector<std::vector<int>> adjacency_matrix(std::size_t n, const Edges& edges) {
  std::vector<std::vector<int>> a(n, std::vector<int>(n, 0));
  for (auto [u, v] : edges) {
    if (u == v) continue;
    a[u][v] = 1;
    a[v][u] = 1;
  }
  return a;
}

// Floyd-Warshall hop distances; unreachable pairs stay at a large value.
inline std::vector<std::vector<std::size_t>> hop_distances(std::size_t n, const Edges& edges) {
  const std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
  const auto a = adjacency_matrix(n, edges);
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (a[i][j]) d[i][j] = 1;
    }
  }
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][m] + d[m][j]);
    }
  }
  return d;
}

// Fraction of the most common class among nodes at distance 1..k; 1 when empty.
inline std::vector<double> neighborhood_homophily(std::size_t n, const Edges& edges,
                                                  const std::vector<std::uint32_t>& labels, std::size_t k) {
  const auto d = hop_distances(n, edges);
  std::vector<double> out(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::map<std::uint32_t, std::size_t> count;
    std::size_t total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && d[i][j] <= k) {
        ++count[labels[j]];
        ++total;
      }
    }
    if (total == 0) continue;
    std::size_t best = 0;
    for (const auto& [c, m] : count) best = std::max(best, m);
    out[i] = static_cast<double>(best) / static_cast<double>(total);
  }
  return out;
}

// Dense D^-1/2 (A [+ I]) D^-1/2, degrees taken from the same matrix.
inline std::vector<std::vector<double>> dense_normalized(std::size_t n, const Edges& edges, bool self_loop) {
  auto a = adjacency_matrix(n, edges);
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = a[i][j] + ((self_loop && i == j) ? 1 : 0);
  }
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) deg[i] += m[i][j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (m[i][j] != 0.0) m[i][j] /= std::sqrt(deg[i] * deg[j]);
    }
  }
  return m;
}

inline nhg::LabelVec random_labels(std::size_t n, std::size_t c, std::mt19937_64& gen) {
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(c - 1));
  nhg::LabelVec l;
  l.num_classes = c;
  for (std::size_t i = 0; i < n; ++i) l.y.push_back(pick(gen));
  return l;
}

inline nhg::Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  nhg::Tensor t(r, c);
  for (double& x : t.data) x = nd(gen);
  return t;
}

}  // namespace oracle
