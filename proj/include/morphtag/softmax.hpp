#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace morphtag {

struct SoftmaxXent {
  double loss = 0.0;
  std::vector<double> probabilities;
};

/// Max-shifted softmax and -log p[gold]. Throws BadClassIndex.
SoftmaxXent softmax_xent(std::span<const double> logits, std::size_t gold);

std::vector<double> softmax(std::span<const double> logits);

/// Index of the largest value; the lowest index wins ties.
std::size_t argmax(std::span<const double> values);

}  // namespace morphtag
