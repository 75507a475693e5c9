#pragma once

#include "morphtag/graph.hpp"

namespace morphtag {

// Plain SGD with a geometric per-epoch decay of the learning rate.
struct OptimizerState {
  double base_rate = 0.13;
  double decay = 0.05;
  int epoch = 0;

  void validate() const;
  /// base_rate * (1 - decay)^epoch
  double rate() const;
  void next_epoch() { ++epoch; }
};

double decayed_rate(double base_rate, double decay, int epoch);

/// theta <- theta - rate * grad for every parameter, then clears the
/// gradients. Throws NonFiniteGradient.
void sgd_step(ParameterStore& params, const OptimizerState& opt);

/// Single-tensor form. Throws DimensionMismatch.
void sgd_step(Tensor& param, const Tensor& grad, double rate);

}  // namespace morphtag
