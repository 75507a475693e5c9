#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "morphtag/tensor.hpp"

namespace morphtag {

using ParamId = std::size_t;
using NodeId = std::size_t;

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  // Embedding tables only receive gradient on looked-up rows; the optimizer
  // visits just those.
  bool row_sparse = false;
  std::vector<std::size_t> touched_rows;
  std::vector<bool> touched;
};

// Owns every trainable tensor of a model, in creation order.
class ParameterStore {
 public:
  ParamId add(std::string name, std::vector<std::size_t> shape, bool row_sparse = false);

  Parameter& at(ParamId id) { return params_.at(id); }
  const Parameter& at(ParamId id) const { return params_.at(id); }
  std::optional<ParamId> find(std::string_view name) const;
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  std::vector<Parameter>& params() { return params_; }
  const std::vector<Parameter>& params() const { return params_; }

  void mark_row(ParamId id, std::size_t row);
  void zero_grads();

 private:
  std::vector<Parameter> params_;
};

/// Uniform in [-r, r], r = sqrt(6 / (fan_in + fan_out)).
void init_uniform_glorot(std::span<double> values, std::size_t fan_in, std::size_t fan_out,
                         std::mt19937_64& rng);

// Dynamic computation graph over vectors, recorded as a tape in creation
// order. Matrices only enter through parameters (affine terms and lookups),
// so every node value is a vector.
class Graph {
 public:
  explicit Graph(const ParameterStore& store) : store_(&store) {}
  explicit Graph(ParameterStore& store) : store_(&store), mutable_store_(&store) {}

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  NodeId input(std::vector<double> values);
  NodeId zeros(std::size_t n);
  NodeId lookup(ParamId table, std::size_t row);
  /// bias + sum_k W_k x_k.
  NodeId affine(ParamId bias, std::span<const std::pair<ParamId, NodeId>> terms);
  NodeId add(NodeId a, NodeId b);
  NodeId cmul(NodeId a, NodeId b);
  NodeId logistic(NodeId a);
  NodeId tanh(NodeId a);
  NodeId concat(std::span<const NodeId> parts);
  NodeId slice(NodeId a, std::size_t begin, std::size_t length);
  /// Scalar -log softmax(logits)[gold].
  NodeId pick_neg_log_softmax(NodeId logits, std::size_t gold);
  /// Elementwise sum of equally sized nodes.
  NodeId sum(std::span<const NodeId> parts);

  const std::vector<double>& value(NodeId id) const { return nodes_.at(id).value; }
  std::size_t dim(NodeId id) const { return nodes_.at(id).value.size(); }
  double scalar(NodeId id) const;
  std::size_t node_count() const { return nodes_.size(); }

  /// Accumulates d(loss)/d(param) into the store's gradients. `loss` must be
  /// a scalar node. Throws NonFiniteGradient.
  void backward(NodeId loss);

 private:
  enum class Op { Input, Lookup, Affine, Add, CMul, Logistic, Tanh, Concat, Slice, PickNls, Sum };

  struct Node {
    Op op;
    std::vector<NodeId> args;
    std::vector<ParamId> params;  // Lookup: table. Affine: bias then one weight per arg.
    std::size_t aux = 0;          // Lookup row, Slice begin, PickNls gold.
    std::vector<double> value;
    std::vector<double> cache;    // PickNls probabilities.
  };

  NodeId push(Node node, std::string_view what);

  const ParameterStore* store_;
  ParameterStore* mutable_store_ = nullptr;
  std::vector<Node> nodes_;
};

}  // namespace morphtag
