#include "nmtrnng/core/graph.hpp"

#include <string>

#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::core {

const Tensor& Expr::value() const { return graph->value(index); }

Expr Graph::push(Node node) {
  nodes_.push_back(std::move(node));
  return Expr{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const ParameterStore& Graph::require_store() const {
  if (!store_) throw Error("graph has no parameter store attached");
  return *store_;
}

Expr Graph::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Expr Graph::zeros(std::size_t n) { return constant(Tensor({n})); }

Expr Graph::parameter(ParamId id) {
  require_store();
  if (id.index >= store_->size()) throw Error("parameter id out of range");
  auto it = param_nodes_.find(id.index);
  if (it != param_nodes_.end()) return Expr{this, it->second};
  Node n;
  n.is_param = true;
  n.param = id;
  Expr e = push(std::move(n));
  param_nodes_.emplace(id.index, e.index);
  return e;
}

Expr Graph::lookup(ParamId id, std::size_t row) {
  const Parameter& p = require_store()[id];
  if (p.value.rank() != 2) {
    throw DimensionError("lookup on non-matrix slot '" + p.name + "'");
  }
  if (row >= p.value.rows()) {
    throw VocabularyError("row " + std::to_string(row) + " out of range for '" +
                          p.name + "' with " + std::to_string(p.value.rows()) +
                          " rows");
  }
  const std::size_t cols = p.value.cols();
  std::vector<double> v(p.value.data() + row * cols,
                        p.value.data() + (row + 1) * cols);
  Node n;
  n.value = Tensor::vector(std::move(v));
  n.backward = [id, row](Graph& g, std::uint32_t self) {
    if (!g.mutable_store_) return;
    Tensor& target = (*g.mutable_store_)[id].grad;
    const Tensor& gout = g.grad(self);
    const std::size_t c = gout.size();
    for (std::size_t k = 0; k < c; ++k) target[row * c + k] += gout[k];
  };
  return push(std::move(n));
}

Expr Graph::add_node(Tensor value, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  n.backward = std::move(backward);
  return push(std::move(n));
}

const Tensor& Graph::value(std::uint32_t i) const {
  const Node& n = nodes_[i];
  if (n.is_param) return (*store_)[n.param].value;
  return n.value;
}

Tensor& Graph::grad(std::uint32_t i) {
  Node& n = nodes_[i];
  if (n.is_param) {
    if (!mutable_store_) throw Error("gradient requested on an inference graph");
    n.grad_ready = true;
    return (*mutable_store_)[n.param].grad;
  }
  if (!n.grad_ready) {
    n.grad = Tensor(n.value.shape());
    n.grad_ready = true;
  }
  return n.grad;
}

void Graph::backward(Expr loss) {
  if (!mutable_store_ && store_) {
    throw Error("backward on a graph built over a read-only parameter store");
  }
  if (loss.graph != this) throw Error("loss expression belongs to another graph");
  if (value(loss.index).size() != 1) {
    throw DimensionError("backward requires a scalar loss, got shape " +
                         value(loss.index).shape_string());
  }
  grad(loss.index)[0] += 1.0;
  for (std::int64_t i = loss.index; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.grad_ready || !n.backward) continue;
    n.backward(*this, static_cast<std::uint32_t>(i));
  }
}

}  // namespace nmtrnng::core
