#include "morphtag/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "morphtag/errors.hpp"

namespace morphtag {

namespace {

std::size_t volume(const std::vector<std::size_t>& shape) {
  if (shape.empty()) throw DimensionMismatch("tensor shape must have at least one extent");
  for (auto e : shape) {
    if (e == 0) throw DimensionMismatch("tensor extents must be positive");
  }
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)), data_(volume(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (volume(shape_) != data_.size()) {
    throw DimensionMismatch("tensor data has " + std::to_string(data_.size()) +
                            " values, shape requires " + std::to_string(volume(shape_)));
  }
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void Tensor::check_finite(std::string_view what) const {
  if (!all_finite(data_)) throw NonFiniteValue("non-finite value in " + std::string(what));
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace morphtag
