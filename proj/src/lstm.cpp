#include "morphtag/lstm.hpp"

#include <array>
#include <utility>

#include "morphtag/errors.hpp"

namespace morphtag {

LstmCellParams LstmCellParams::create(ParameterStore& store, const std::string& prefix, std::size_t input_dim,
                                      std::size_t hidden_dim, std::mt19937_64& rng) {
  if (input_dim == 0 || hidden_dim == 0) throw DimensionMismatch("LSTM dimensions must be positive");
  LstmCellParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  const std::size_t h4 = 4 * hidden_dim;
  p.wx = store.add(prefix + ".wx", {h4, input_dim});
  p.wh = store.add(prefix + ".wh", {h4, hidden_dim});
  p.bias = store.add(prefix + ".b", {h4});
  auto wx = store.at(p.wx).value.data();
  auto wh = store.at(p.wh).value.data();
  for (std::size_t gate = 0; gate < 4; ++gate) {
    init_uniform_glorot(wx.subspan(gate * hidden_dim * input_dim, hidden_dim * input_dim), input_dim,
                        hidden_dim, rng);
    init_uniform_glorot(wh.subspan(gate * hidden_dim * hidden_dim, hidden_dim * hidden_dim), hidden_dim,
                        hidden_dim, rng);
  }
  auto b = store.at(p.bias).value.data();
  for (std::size_t i = hidden_dim; i < 2 * hidden_dim; ++i) b[i] = 1.0;
  return p;
}

LstmCellParams LstmCellParams::bind(const ParameterStore& store, const std::string& prefix) {
  auto need = [&](const std::string& name) {
    auto id = store.find(name);
    if (!id) throw ModelFormatError("missing parameter '" + name + "'");
    return *id;
  };
  LstmCellParams p;
  p.wx = need(prefix + ".wx");
  p.wh = need(prefix + ".wh");
  p.bias = need(prefix + ".b");
  const Tensor& wx = store.at(p.wx).value;
  const Tensor& wh = store.at(p.wh).value;
  p.hidden_dim = wh.cols();
  p.input_dim = wx.cols();
  if (wx.rows() != 4 * p.hidden_dim || wh.rows() != 4 * p.hidden_dim ||
      store.at(p.bias).value.size() != 4 * p.hidden_dim) {
    throw ModelFormatError("inconsistent LSTM parameter shapes under '" + prefix + "'");
  }
  return p;
}

LstmState lstm_initial_state(Graph& g, const LstmCellParams& p) {
  return {g.zeros(p.hidden_dim), g.zeros(p.hidden_dim)};
}

LstmState lstm_step(Graph& g, const LstmCellParams& p, NodeId input, LstmState state) {
  if (g.dim(input) != p.input_dim) {
    throw DimensionMismatch("lstm_step: input has " + std::to_string(g.dim(input)) + " values, cell expects " +
                            std::to_string(p.input_dim));
  }
  if (g.dim(state.hidden) != p.hidden_dim || g.dim(state.cell) != p.hidden_dim) {
    throw DimensionMismatch("lstm_step: state size differs from hidden size " + std::to_string(p.hidden_dim));
  }
  const std::size_t h = p.hidden_dim;
  const std::array<std::pair<ParamId, NodeId>, 2> terms{{{p.wx, input}, {p.wh, state.hidden}}};
  const NodeId pre = g.affine(p.bias, terms);
  const NodeId in_gate = g.logistic(g.slice(pre, 0, h));
  const NodeId forget_gate = g.logistic(g.slice(pre, h, h));
  const NodeId out_gate = g.logistic(g.slice(pre, 2 * h, h));
  const NodeId candidate = g.tanh(g.slice(pre, 3 * h, h));
  const NodeId cell = g.add(g.cmul(forget_gate, state.cell), g.cmul(in_gate, candidate));
  const NodeId hidden = g.cmul(out_gate, g.tanh(cell));
  return {hidden, cell};
}

BiEncoderParams BiEncoderParams::create(ParameterStore& store, const std::string& prefix, std::size_t input_dim,
                                        std::size_t hidden_dim, std::mt19937_64& rng) {
  BiEncoderParams p;
  p.forward = LstmCellParams::create(store, prefix + ".fwd", input_dim, hidden_dim, rng);
  p.backward = LstmCellParams::create(store, prefix + ".bwd", input_dim, hidden_dim, rng);
  return p;
}

BiEncoderParams BiEncoderParams::bind(const ParameterStore& store, const std::string& prefix) {
  BiEncoderParams p;
  p.forward = LstmCellParams::bind(store, prefix + ".fwd");
  p.backward = LstmCellParams::bind(store, prefix + ".bwd");
  if (p.forward.input_dim != p.backward.input_dim || p.forward.hidden_dim != p.backward.hidden_dim) {
    throw ModelFormatError("directions of '" + prefix + "' disagree in shape");
  }
  return p;
}

namespace {

struct Passes {
  std::vector<NodeId> forward;
  std::vector<NodeId> backward;  // aligned with input positions
};

Passes run_both(Graph& g, const BiEncoderParams& p, std::span<const NodeId> inputs) {
  if (inputs.empty()) throw EmptySequence("bidirectional encoder over an empty sequence");
  const std::size_t n = inputs.size();
  Passes out;
  out.forward.resize(n);
  out.backward.resize(n);
  LstmState s = lstm_initial_state(g, p.forward);
  for (std::size_t t = 0; t < n; ++t) {
    s = lstm_step(g, p.forward, inputs[t], s);
    out.forward[t] = s.hidden;
  }
  s = lstm_initial_state(g, p.backward);
  for (std::size_t t = n; t-- > 0;) {
    s = lstm_step(g, p.backward, inputs[t], s);
    out.backward[t] = s.hidden;
  }
  return out;
}

}  // namespace

std::vector<NodeId> bi_encode(Graph& g, const BiEncoderParams& p, std::span<const NodeId> inputs) {
  Passes passes = run_both(g, p, inputs);
  std::vector<NodeId> out(inputs.size());
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const std::array<NodeId, 2> parts{passes.forward[t], passes.backward[t]};
    out[t] = g.concat(parts);
  }
  return out;
}

NodeId bi_summary(Graph& g, const BiEncoderParams& p, std::span<const NodeId> inputs) {
  Passes passes = run_both(g, p, inputs);
  const std::array<NodeId, 2> parts{passes.forward.back(), passes.backward.front()};
  return g.concat(parts);
}

}  // namespace morphtag
