#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nhgcn/tensor.hpp"

namespace nhg {

class Rng;

/// Named learnable tensors of one model instance, in a fixed order.
///
/// Weight sharing is expressed by registering a single name (e.g. "W1")
/// that the forward pass uses for both channels, so there is one storage
/// and one gradient.
class ParamSet {
 public:
  void add(std::string name, Tensor value);
  bool contains(const std::string& name) const;
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;

  std::size_t size() const { return entries_.size(); }
  /// Total number of scalar parameters.
  std::size_t scalar_count() const;

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Zero tensors with this set's names and shapes.
  ParamSet zeros_like() const;
  /// Throws ShapeError unless `other` has the same names and shapes in order.
  void require_same_layout(const ParamSet& other) const;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
};

using Gradients = ParamSet;

/// Uniform Glorot initialization, U(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

struct AdamState {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// L2 coefficient folded into the gradient before the moment updates.
  double weight_decay = 0.0;
  std::uint64_t step = 0;
  ParamSet first_moment;
  ParamSet second_moment;
};

AdamState make_adam(const ParamSet& params, double lr, double weight_decay);

/// One bias-corrected Adam update in place.
void adam_step(AdamState& state, ParamSet& params, const Gradients& grads);

/// Returns the loss at `params`; fills `grads` (same layout) when non-null.
using LossFn = std::function<double(const ParamSet& params, Gradients* grads)>;

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  std::size_t probes = 0;
};

/// Central differences with step 1e-5 at `probes` random entries (every
/// parameter is probed at least once). Error per entry is
/// |analytic - numeric| / max(1, |numeric|).
GradCheckReport grad_check(const LossFn& fn, const ParamSet& params, std::size_t probes,
                           std::uint64_t seed, double step = 1e-5);

}  // namespace nhg
