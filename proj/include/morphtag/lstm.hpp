#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "morphtag/graph.hpp"

namespace morphtag {

// Gate blocks are stacked in the order input, forget, output, candidate:
//   i = σ(Wx_i x + Wh_i h + b_i)   f = σ(...)   o = σ(...)   g = tanh(...)
//   c' = f ⊙ c + i ⊙ g             h' = o ⊙ tanh(c')
struct LstmCellParams {
  ParamId wx = 0;    // 4H x D
  ParamId wh = 0;    // 4H x H
  ParamId bias = 0;  // 4H
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;

  /// Glorot-uniform weights per gate block, zero biases except the forget
  /// gate (1.0).
  static LstmCellParams create(ParameterStore& store, const std::string& prefix, std::size_t input_dim,
                               std::size_t hidden_dim, std::mt19937_64& rng);
  /// Re-binds to parameters already present in `store` (after loading).
  static LstmCellParams bind(const ParameterStore& store, const std::string& prefix);
};

struct LstmState {
  NodeId hidden;
  NodeId cell;
};

LstmState lstm_initial_state(Graph& g, const LstmCellParams& p);

/// One recurrent step. Throws DimensionMismatch.
LstmState lstm_step(Graph& g, const LstmCellParams& p, NodeId input, LstmState state);

struct BiEncoderParams {
  LstmCellParams forward;
  LstmCellParams backward;

  static BiEncoderParams create(ParameterStore& store, const std::string& prefix, std::size_t input_dim,
                                std::size_t hidden_dim, std::mt19937_64& rng);
  static BiEncoderParams bind(const ParameterStore& store, const std::string& prefix);

  std::size_t output_dim() const { return 2 * forward.hidden_dim; }
};

/// Per-position [forward h_t ; backward h_t], width 2H. Throws EmptySequence.
std::vector<NodeId> bi_encode(Graph& g, const BiEncoderParams& p, std::span<const NodeId> inputs);

/// [final forward hidden ; final backward hidden] (the backward pass ends on
/// the first element). Throws EmptySequence.
NodeId bi_summary(Graph& g, const BiEncoderParams& p, std::span<const NodeId> inputs);

}  // namespace morphtag
