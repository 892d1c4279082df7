#include "nhgcn/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "nhgcn/error.hpp"
#include "nhgcn/rng.hpp"

namespace nhg {

Tensor::Tensor(std::size_t r, std::size_t c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
  if (data.size() != r * c) {
    throw ShapeError("tensor " + std::to_string(r) + "x" + std::to_string(c) + " given " +
                     std::to_string(data.size()) + " values");
  }
}

bool Tensor::all_finite() const {
  return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

std::string Tensor::shape_string() const {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shapes " + a.shape_string() + " and " + b.shape_string());
  }
}

void require_finite(const Tensor& t, const char* what) {
  if (!t.all_finite()) throw InputError(std::string(what) + ": non-finite entry");
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols != b.rows) {
    throw ShapeError("matmul: " + a.shape_string() + " * " + b.shape_string());
  }
  Tensor out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* o = out.data.data() + i * out.cols;
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double s = a(i, k);
      // Raw feature matrices are mostly zeros.
      if (s == 0.0) continue;
      const double* br = b.data.data() + k * b.cols;
      for (std::size_t j = 0; j < b.cols; ++j) o[j] += s * br[j];
    }
  }
  return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  if (a.rows != b.rows) {
    throw ShapeError("matmul_tn: " + a.shape_string() + "^T * " + b.shape_string());
  }
  Tensor out(a.cols, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* br = b.data.data() + i * b.cols;
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double s = a(i, k);
      if (s == 0.0) continue;
      double* o = out.data.data() + k * out.cols;
      for (std::size_t j = 0; j < b.cols; ++j) o[j] += s * br[j];
    }
  }
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  if (a.cols != b.cols) {
    throw ShapeError("matmul_nt: " + a.shape_string() + " * " + b.shape_string() + "^T");
  }
  Tensor out(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* ar = a.data.data() + i * a.cols;
    for (std::size_t j = 0; j < b.rows; ++j) {
      const double* br = b.data.data() + j * b.cols;
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) s += ar[k] * br[k];
      out(i, j) = s;
    }
  }
  return out;
}

Tensor spmm(const SparseMatrix& op, const Tensor& x) {
  if (op.cols != x.rows) {
    throw ShapeError("spmm: operator " + std::to_string(op.rows) + "x" + std::to_string(op.cols) +
                     " * " + x.shape_string());
  }
  Tensor out(op.rows, x.cols);
  for (std::size_t r = 0; r < op.rows; ++r) {
    double* o = out.data.data() + r * out.cols;
    for (std::size_t p = op.row_ptr[r]; p < op.row_ptr[r + 1]; ++p) {
      const double w = op.values[p];
      const double* xr = x.data.data() + static_cast<std::size_t>(op.col_idx[p]) * x.cols;
      for (std::size_t j = 0; j < x.cols; ++j) o[j] += w * xr[j];
    }
  }
  return out;
}

Tensor spmm_transposed(const SparseMatrix& op, const Tensor& x) {
  if (op.rows != x.rows) {
    throw ShapeError("spmm_transposed: operator " + std::to_string(op.rows) + "x" +
                     std::to_string(op.cols) + "^T * " + x.shape_string());
  }
  Tensor out(op.cols, x.cols);
  for (std::size_t r = 0; r < op.rows; ++r) {
    const double* xr = x.data.data() + r * x.cols;
    for (std::size_t p = op.row_ptr[r]; p < op.row_ptr[r + 1]; ++p) {
      const double w = op.values[p];
      double* o = out.data.data() + static_cast<std::size_t>(op.col_idx[p]) * out.cols;
      for (std::size_t j = 0; j < x.cols; ++j) o[j] += w * xr[j];
    }
  }
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor tanh(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.data) v = std::tanh(v);
  return out;
}

Tensor row_softmax(const Tensor& x) {
  Tensor out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto in = x.row(i);
    auto o = out.row(i);
    const double mx = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      o[j] = std::exp(in[j] - mx);
      sum += o[j];
    }
    for (double& v : o) v /= sum;
  }
  if (!out.all_finite()) throw DivergenceError("row_softmax: non-finite logits");
  return out;
}

Tensor dropout(const Tensor& x, double p, bool training, Rng& rng, std::vector<std::uint8_t>* keep) {
  if (!(p >= 0.0 && p < 1.0)) throw InputError("dropout probability must lie in [0, 1)");
  if (keep) keep->assign(x.size(), 1);
  if (!training || p == 0.0) return x;
  Tensor out = x;
  const double scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (rng.uniform() < p) {
      out.data[i] = 0.0;
      if (keep) (*keep)[i] = 0;
    } else {
      out.data[i] *= scale;
    }
  }
  return out;
}

Tensor elementwise_max(std::span<const Tensor> xs) {
  if (xs.empty()) throw ShapeError("elementwise_max: no operands");
  Tensor out = xs[0];
  for (std::size_t t = 1; t < xs.size(); ++t) {
    require_same_shape(out, xs[t], "elementwise_max");
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = std::max(out.data[i], xs[t].data[i]);
  }
  return out;
}

Tensor concat_cols(std::span<const Tensor> xs) {
  if (xs.empty()) throw ShapeError("concat_cols: no operands");
  std::size_t cols = 0;
  for (const Tensor& t : xs) {
    if (t.rows != xs[0].rows) throw ShapeError("concat_cols: row counts differ");
    cols += t.cols;
  }
  Tensor out(xs[0].rows, cols);
  for (std::size_t i = 0; i < out.rows; ++i) {
    double* o = out.data.data() + i * cols;
    for (const Tensor& t : xs) {
      auto r = t.row(i);
      o = std::copy(r.begin(), r.end(), o);
    }
  }
  return out;
}

std::vector<double> scalar_softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace nhg
