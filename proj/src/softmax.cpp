#include "morphtag/softmax.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "morphtag/errors.hpp"

namespace morphtag {

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw DimensionMismatch("softmax over an empty vector");
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

SoftmaxXent softmax_xent(std::span<const double> logits, std::size_t gold) {
  if (gold >= logits.size()) {
    throw BadClassIndex("class index " + std::to_string(gold) + " out of range for " +
                        std::to_string(logits.size()) + " classes");
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - m);
  SoftmaxXent out;
  out.probabilities.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out.probabilities[i] = std::exp(logits[i] - m) / z;
  out.loss = -(logits[gold] - m - std::log(z));
  return out;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw DimensionMismatch("argmax over an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace morphtag
