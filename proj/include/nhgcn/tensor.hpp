#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nhgcn/graph.hpp"

namespace nhg {

class Rng;

/// Dense row-major matrix of doubles.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  Tensor(std::size_t r, std::size_t c, std::vector<double> values);

  std::size_t size() const { return data.size(); }
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  bool all_finite() const;
  std::string shape_string() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// Throws ShapeError unless a and b have equal shape.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

/// Throws InputError if any entry is NaN or infinite.
void require_finite(const Tensor& t, const char* what);

// Forward kernels. All throw ShapeError on mismatched operands.

Tensor matmul(const Tensor& a, const Tensor& b);
/// a^T * b without materializing the transpose.
Tensor matmul_tn(const Tensor& a, const Tensor& b);
/// a * b^T.
Tensor matmul_nt(const Tensor& a, const Tensor& b);

Tensor spmm(const SparseMatrix& op, const Tensor& x);
/// op^T * x.
Tensor spmm_transposed(const SparseMatrix& op, const Tensor& x);

Tensor relu(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor row_softmax(const Tensor& x);

/// Inverted dropout: survivors are scaled by 1/(1-p). Identity unless
/// `training`. When `keep` is non-null it receives the 0/1 keep mask.
Tensor dropout(const Tensor& x, double p, bool training, Rng& rng,
               std::vector<std::uint8_t>* keep = nullptr);

Tensor elementwise_max(std::span<const Tensor> xs);
Tensor concat_cols(std::span<const Tensor> xs);

/// Softmax of a short logit vector onto the probability simplex.
std::vector<double> scalar_softmax(std::span<const double> logits);

}  // namespace nhg
