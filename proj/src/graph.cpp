#include "morphtag/graph.hpp"

#include <cmath>

#include "morphtag/errors.hpp"
#include "morphtag/softmax.hpp"

namespace morphtag {

ParamId ParameterStore::add(std::string name, std::vector<std::size_t> shape, bool row_sparse) {
  if (find(name)) throw ConfigError("duplicate parameter name '" + name + "'");
  Parameter p;
  p.name = std::move(name);
  p.value = Tensor(shape);
  p.grad = Tensor(std::move(shape));
  p.row_sparse = row_sparse;
  if (row_sparse) p.touched.assign(p.value.rows(), false);
  params_.push_back(std::move(p));
  return params_.size() - 1;
}

std::optional<ParamId> ParameterStore::find(std::string_view name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParameterStore::mark_row(ParamId id, std::size_t row) {
  Parameter& p = params_.at(id);
  if (p.row_sparse && !p.touched[row]) {
    p.touched[row] = true;
    p.touched_rows.push_back(row);
  }
}

void ParameterStore::zero_grads() {
  for (auto& p : params_) {
    if (p.row_sparse) {
      for (auto r : p.touched_rows) {
        for (double& g : p.grad.row(r)) g = 0.0;
        p.touched[r] = false;
      }
      p.touched_rows.clear();
    } else {
      p.grad.fill(0.0);
    }
  }
}

void init_uniform_glorot(std::span<double> values, std::size_t fan_in, std::size_t fan_out,
                         std::mt19937_64& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-r, r);
  for (double& v : values) v = dist(rng);
}

namespace {

double sigmoid(double x) {
  // Split by sign so exp never overflows.
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionMismatch(std::string(op) + ": operand sizes " + std::to_string(a) + " and " +
                            std::to_string(b) + " differ");
  }
}

}  // namespace

NodeId Graph::push(Node node, std::string_view what) {
  if (!all_finite(node.value)) throw NonFiniteValue("non-finite output from " + std::string(what));
  nodes_.push_back(std::move(node));
  return nodes_.size() - 1;
}

NodeId Graph::input(std::vector<double> values) {
  if (values.empty()) throw DimensionMismatch("input: empty vector");
  Node n{Op::Input, {}, {}, 0, std::move(values), {}};
  return push(std::move(n), "input");
}

NodeId Graph::zeros(std::size_t n) { return input(std::vector<double>(n, 0.0)); }

NodeId Graph::lookup(ParamId table, std::size_t row) {
  const Tensor& t = store_->at(table).value;
  if (row >= t.rows()) {
    throw DimensionMismatch("lookup: row " + std::to_string(row) + " outside table '" +
                            store_->at(table).name + "' with " + std::to_string(t.rows()) + " rows");
  }
  auto r = t.row(row);
  Node n{Op::Lookup, {}, {table}, row, std::vector<double>(r.begin(), r.end()), {}};
  return push(std::move(n), "lookup");
}

NodeId Graph::affine(ParamId bias, std::span<const std::pair<ParamId, NodeId>> terms) {
  const Tensor& b = store_->at(bias).value;
  Node n{Op::Affine, {}, {bias}, 0, std::vector<double>(b.data().begin(), b.data().end()), {}};
  for (const auto& [w_id, x_id] : terms) {
    const Parameter& w = store_->at(w_id);
    const auto& x = nodes_.at(x_id).value;
    if (w.value.rank() != 2 || w.value.rows() != b.size() || w.value.cols() != x.size()) {
      throw DimensionMismatch("affine: weight '" + w.name + "' is " + std::to_string(w.value.rows()) + "x" +
                              std::to_string(w.value.cols()) + ", expected " + std::to_string(b.size()) +
                              "x" + std::to_string(x.size()));
    }
    const std::size_t cols = x.size();
    const double* wd = w.value.data().data();
    for (std::size_t r = 0; r < n.value.size(); ++r) {
      const double* wr = wd + r * cols;
      double acc = 0.0;
      for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
      n.value[r] += acc;
    }
    n.params.push_back(w_id);
    n.args.push_back(x_id);
  }
  return push(std::move(n), "affine");
}

NodeId Graph::add(NodeId a, NodeId b) {
  const auto& va = nodes_.at(a).value;
  const auto& vb = nodes_.at(b).value;
  require_same_dim(va.size(), vb.size(), "add");
  Node n{Op::Add, {a, b}, {}, 0, va, {}};
  for (std::size_t i = 0; i < vb.size(); ++i) n.value[i] += vb[i];
  return push(std::move(n), "add");
}

NodeId Graph::cmul(NodeId a, NodeId b) {
  const auto& va = nodes_.at(a).value;
  const auto& vb = nodes_.at(b).value;
  require_same_dim(va.size(), vb.size(), "cmul");
  Node n{Op::CMul, {a, b}, {}, 0, va, {}};
  for (std::size_t i = 0; i < vb.size(); ++i) n.value[i] *= vb[i];
  return push(std::move(n), "cmul");
}

NodeId Graph::logistic(NodeId a) {
  Node n{Op::Logistic, {a}, {}, 0, nodes_.at(a).value, {}};
  for (double& v : n.value) v = sigmoid(v);
  return push(std::move(n), "logistic");
}

NodeId Graph::tanh(NodeId a) {
  Node n{Op::Tanh, {a}, {}, 0, nodes_.at(a).value, {}};
  for (double& v : n.value) v = std::tanh(v);
  return push(std::move(n), "tanh");
}

NodeId Graph::concat(std::span<const NodeId> parts) {
  if (parts.empty()) throw DimensionMismatch("concat: no operands");
  Node n{Op::Concat, {parts.begin(), parts.end()}, {}, 0, {}, {}};
  for (NodeId p : parts) {
    const auto& v = nodes_.at(p).value;
    n.value.insert(n.value.end(), v.begin(), v.end());
  }
  return push(std::move(n), "concat");
}

NodeId Graph::slice(NodeId a, std::size_t begin, std::size_t length) {
  const auto& va = nodes_.at(a).value;
  if (length == 0 || begin + length > va.size()) throw DimensionMismatch("slice: range outside operand");
  Node n{Op::Slice, {a}, {}, begin, {va.begin() + begin, va.begin() + begin + length}, {}};
  return push(std::move(n), "slice");
}

NodeId Graph::pick_neg_log_softmax(NodeId logits, std::size_t gold) {
  SoftmaxXent sx = softmax_xent(nodes_.at(logits).value, gold);
  Node n{Op::PickNls, {logits}, {}, gold, {sx.loss}, std::move(sx.probabilities)};
  return push(std::move(n), "softmax cross-entropy");
}

NodeId Graph::sum(std::span<const NodeId> parts) {
  if (parts.empty()) throw DimensionMismatch("sum: no operands");
  Node n{Op::Sum, {parts.begin(), parts.end()}, {}, 0, nodes_.at(parts[0]).value, {}};
  for (std::size_t k = 1; k < parts.size(); ++k) {
    const auto& v = nodes_.at(parts[k]).value;
    require_same_dim(n.value.size(), v.size(), "sum");
    for (std::size_t i = 0; i < v.size(); ++i) n.value[i] += v[i];
  }
  return push(std::move(n), "sum");
}

double Graph::scalar(NodeId id) const {
  const auto& v = nodes_.at(id).value;
  if (v.size() != 1) throw DimensionMismatch("scalar: node has " + std::to_string(v.size()) + " values");
  return v[0];
}

void Graph::backward(NodeId loss) {
  if (mutable_store_ == nullptr) throw ConfigError("backward on a graph over a read-only parameter store");
  if (dim(loss) != 1) throw DimensionMismatch("backward: loss must be a scalar");

  std::vector<std::vector<double>> grads(loss + 1);
  grads[loss] = {1.0};
  auto grad_of = [&](NodeId id) -> std::vector<double>& {
    auto& g = grads[id];
    if (g.empty()) g.assign(nodes_[id].value.size(), 0.0);
    return g;
  };

  for (NodeId id = loss + 1; id-- > 0;) {
    if (grads[id].empty()) continue;
    const std::vector<double>& g = grads[id];
    if (!all_finite(g)) throw NonFiniteGradient("non-finite gradient at graph node " + std::to_string(id));
    const Node& n = nodes_[id];
    switch (n.op) {
      case Op::Input:
        break;
      case Op::Lookup: {
        Parameter& table = mutable_store_->at(n.params[0]);
        auto row = table.grad.row(n.aux);
        for (std::size_t i = 0; i < g.size(); ++i) row[i] += g[i];
        mutable_store_->mark_row(n.params[0], n.aux);
        break;
      }
      case Op::Affine: {
        Parameter& b = mutable_store_->at(n.params[0]);
        for (std::size_t i = 0; i < g.size(); ++i) b.grad[i] += g[i];
        for (std::size_t k = 0; k < n.args.size(); ++k) {
          Parameter& w = mutable_store_->at(n.params[k + 1]);
          const auto& x = nodes_[n.args[k]].value;
          auto& gx = grad_of(n.args[k]);
          const std::size_t cols = x.size();
          double* wg = w.grad.data().data();
          const double* wv = w.value.data().data();
          for (std::size_t r = 0; r < g.size(); ++r) {
            const double gr = g[r];
            if (gr == 0.0) continue;
            double* wgr = wg + r * cols;
            const double* wvr = wv + r * cols;
            for (std::size_t c = 0; c < cols; ++c) {
              wgr[c] += gr * x[c];
              gx[c] += gr * wvr[c];
            }
          }
        }
        break;
      }
      case Op::Add: {
        for (NodeId a : n.args) {
          auto& ga = grad_of(a);
          for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        }
        break;
      }
      case Op::CMul: {
        const auto& va = nodes_[n.args[0]].value;
        const auto& vb = nodes_[n.args[1]].value;
        {
          auto& ga = grad_of(n.args[0]);
          for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * vb[i];
        }
        {
          auto& gb = grad_of(n.args[1]);
          for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * va[i];
        }
        break;
      }
      case Op::Logistic: {
        auto& ga = grad_of(n.args[0]);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.value[i] * (1.0 - n.value[i]);
        break;
      }
      case Op::Tanh: {
        auto& ga = grad_of(n.args[0]);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - n.value[i] * n.value[i]);
        break;
      }
      case Op::Concat: {
        std::size_t offset = 0;
        for (NodeId a : n.args) {
          auto& ga = grad_of(a);
          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[offset + i];
          offset += ga.size();
        }
        break;
      }
      case Op::Slice: {
        auto& ga = grad_of(n.args[0]);
        for (std::size_t i = 0; i < g.size(); ++i) ga[n.aux + i] += g[i];
        break;
      }
      case Op::PickNls: {
        auto& ga = grad_of(n.args[0]);
        for (std::size_t i = 0; i < ga.size(); ++i) {
          ga[i] += g[0] * (n.cache[i] - (i == n.aux ? 1.0 : 0.0));
        }
        break;
      }
      case Op::Sum: {
        for (NodeId a : n.args) {
          auto& ga = grad_of(a);
          for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        }
        break;
      }
    }
    grads[id].clear();
    grads[id].shrink_to_fit();
  }
}

}  // namespace morphtag
