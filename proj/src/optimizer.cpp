#include "morphtag/optimizer.hpp"

#include <cmath>
#include <string>

#include "morphtag/errors.hpp"

namespace morphtag {

void OptimizerState::validate() const {
  if (!(base_rate > 0.0) || !std::isfinite(base_rate)) throw ConfigError("learning rate must be positive");
  if (!(decay >= 0.0 && decay < 1.0)) throw ConfigError("decay must lie in [0, 1)");
  if (epoch < 0) throw ConfigError("epoch counter must be non-negative");
}

double OptimizerState::rate() const { return decayed_rate(base_rate, decay, epoch); }

double decayed_rate(double base_rate, double decay, int epoch) {
  return base_rate * std::pow(1.0 - decay, epoch);
}

void sgd_step(ParameterStore& params, const OptimizerState& opt) {
  const double rate = opt.rate();
  for (auto& p : params.params()) {
    if (p.row_sparse) {
      for (auto r : p.touched_rows) {
        auto g = p.grad.row(r);
        if (!all_finite(g)) throw NonFiniteGradient("non-finite gradient for '" + p.name + "'");
        auto v = p.value.row(r);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= rate * g[i];
      }
    } else {
      if (!all_finite(p.grad.data())) throw NonFiniteGradient("non-finite gradient for '" + p.name + "'");
      sgd_step(p.value, p.grad, rate);
    }
  }
  params.zero_grads();
}

void sgd_step(Tensor& param, const Tensor& grad, double rate) {
  if (param.shape() != grad.shape()) throw DimensionMismatch("sgd_step: gradient shape differs from parameter");
  for (std::size_t i = 0; i < param.size(); ++i) param[i] -= rate * grad[i];
}

}  // namespace morphtag
