#include "nhgcn/optim.hpp"

#include <algorithm>
#include <cmath>

#include "nhgcn/error.hpp"
#include "nhgcn/rng.hpp"

namespace nhg {

void ParamSet::add(std::string name, Tensor value) {
  if (contains(name)) throw StateError("duplicate parameter '" + name + "'");
  entries_.emplace_back(std::move(name), std::move(value));
}

bool ParamSet::contains(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == name; });
}

Tensor& ParamSet::get(const std::string& name) {
  for (auto& e : entries_) {
    if (e.first == name) return e.second;
  }
  throw StateError("no parameter named '" + name + "'");
}

const Tensor& ParamSet::get(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.first == name) return e.second;
  }
  throw StateError("no parameter named '" + name + "'");
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.second.size();
  return n;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  for (const auto& [name, t] : entries_) out.add(name, Tensor(t.rows, t.cols));
  return out;
}

void ParamSet::require_same_layout(const ParamSet& other) const {
  if (other.entries_.size() != entries_.size()) throw ShapeError("parameter sets differ in size");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].first != other.entries_[i].first ||
        !entries_[i].second.same_shape(other.entries_[i].second)) {
      throw ShapeError("parameter '" + entries_[i].first + "' layout mismatch");
    }
  }
}

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t(fan_in, fan_out);
  for (double& v : t.data) v = rng.uniform(-a, a);
  return t;
}

AdamState make_adam(const ParamSet& params, double lr, double weight_decay) {
  AdamState s;
  s.lr = lr;
  s.weight_decay = weight_decay;
  s.first_moment = params.zeros_like();
  s.second_moment = params.zeros_like();
  return s;
}

void adam_step(AdamState& state, ParamSet& params, const Gradients& grads) {
  params.require_same_layout(grads);
  params.require_same_layout(state.first_moment);
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  auto p = params.begin();
  auto g = grads.begin();
  auto m = state.first_moment.begin();
  auto v = state.second_moment.begin();
  for (; p != params.end(); ++p, ++g, ++m, ++v) {
    auto& w = p->second.data;
    const auto& gd = g->second.data;
    auto& md = m->second.data;
    auto& vd = v->second.data;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = gd[i] + state.weight_decay * w[i];
      md[i] = state.beta1 * md[i] + (1.0 - state.beta1) * gi;
      vd[i] = state.beta2 * vd[i] + (1.0 - state.beta2) * gi * gi;
      const double mhat = md[i] / bc1;
      const double vhat = vd[i] / bc2;
      w[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

GradCheckReport grad_check(const LossFn& fn, const ParamSet& params, std::size_t probes,
                           std::uint64_t seed, double step) {
  GradCheckReport report;
  if (params.size() == 0) return report;
  Gradients analytic = params.zeros_like();
  fn(params, &analytic);
  params.require_same_layout(analytic);

  std::vector<const std::pair<std::string, Tensor>*> entries;
  for (const auto& e : params) entries.push_back(&e);

  Rng rng(seed);
  ParamSet work = params;
  const std::size_t total = std::max(probes, entries.size());
  for (std::size_t probe = 0; probe < total; ++probe) {
    const auto* entry = probe < entries.size() ? entries[probe] : entries[rng.below(entries.size())];
    const std::string& name = entry->first;
    if (entry->second.size() == 0) continue;
    const std::size_t idx = rng.below(entry->second.size());
    double& x = work.get(name).data[idx];
    const double orig = x;
    x = orig + step;
    const double up = fn(work, nullptr);
    x = orig - step;
    const double down = fn(work, nullptr);
    x = orig;
    const double numeric = (up - down) / (2.0 * step);
    const double a = analytic.get(name).data[idx];
    const double err = std::abs(a - numeric) / std::max(1.0, std::abs(numeric));
    ++report.probes;
    if (err > report.max_rel_error || report.probes == 1) {
      report.max_rel_error = std::max(err, report.max_rel_error);
      report.worst_param = name;
      report.worst_index = idx;
    }
  }
  return report;
}

}  // namespace nhg
