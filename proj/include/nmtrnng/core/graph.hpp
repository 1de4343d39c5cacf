#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "nmtrnng/core/parameters.hpp"
#include "nmtrnng/core/tensor.hpp"

namespace nmtrnng::core {

class Graph;

// Handle to a node on a Graph's tape.
struct Expr {
  Graph* graph = nullptr;
  std::uint32_t index = 0;

  bool valid() const { return graph != nullptr; }
  const Tensor& value() const;
  std::size_t dim() const { return value().size(); }
  bool operator==(const Expr&) const = default;
};

// Reverse-mode tape. Nodes are evaluated eagerly on construction and only
// ever reference earlier nodes, so reverse insertion order is a topological
// order for the backward sweep. One Graph per sentence.
//
// Parameter leaves read the ParameterStore in place and their gradient is the
// store's accumulator, so every use site of a slot adds into the same tensor.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::uint32_t self)>;

  Graph() = default;
  explicit Graph(ParameterStore& store) : store_(&store), mutable_store_(&store) {}
  explicit Graph(const ParameterStore& store) : store_(&store) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Expr constant(Tensor value);
  Expr zeros(std::size_t n);
  Expr parameter(ParamId id);
  // Row `row` of a rank-2 slot, as a vector.
  Expr lookup(ParamId id, std::size_t row);

  // Extension point for custom operations. `backward` reads grad(self) and
  // accumulates into the gradients of the nodes it depends on.
  Expr add_node(Tensor value, BackwardFn backward);

  const Tensor& value(std::uint32_t i) const;
  Tensor& grad(std::uint32_t i);

  // Seeds d(loss)/d(loss) = 1 and sweeps the tape. Parameter gradients are
  // added to the store; call ParameterStore::zero_grad between steps.
  void backward(Expr loss);

  std::size_t size() const { return nodes_.size(); }
  bool trainable() const { return mutable_store_ != nullptr; }
  const ParameterStore* store() const { return store_; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool grad_ready = false;
    bool is_param = false;
    ParamId param;
    BackwardFn backward;
  };

  Expr push(Node node);
  const ParameterStore& require_store() const;

  const ParameterStore* store_ = nullptr;
  ParameterStore* mutable_store_ = nullptr;
  std::vector<Node> nodes_;
  std::unordered_map<std::size_t, std::uint32_t> param_nodes_;
};

}  // namespace nmtrnng::core
