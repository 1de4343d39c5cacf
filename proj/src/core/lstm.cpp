#include "nmtrnng/core/lstm.hpp"

#include "nmtrnng/core/errors.hpp"
#include "nmtrnng/core/ops.hpp"

namespace nmtrnng::core {

LstmWeights add_lstm(ParameterStore& store, const std::string& prefix,
                     std::size_t input_dim, std::size_t hidden_dim) {
  LstmWeights w;
  w.input_dim = input_dim;
  w.hidden_dim = hidden_dim;
  w.weight = store.add(prefix + ".W", {4 * hidden_dim, input_dim + hidden_dim},
                       ParamRole::kWeight);
  w.bias = store.add(prefix + ".b", {4 * hidden_dim}, ParamRole::kLstmBias);
  return w;
}

LstmState zero_state(Graph& g, std::size_t hidden_dim) {
  Expr z = g.zeros(hidden_dim);
  return LstmState{z, z};
}

LstmState lstm_step(Graph& g, const LstmWeights& w, const LstmState& state,
                    Expr input) {
  const std::size_t d = w.hidden_dim;
  if (input.dim() != w.input_dim) {
    throw DimensionError("lstm input of dim " + std::to_string(input.dim()) +
                         " for cell expecting " + std::to_string(w.input_dim));
  }
  if (state.hidden.dim() != d || state.cell.dim() != d) {
    throw DimensionError("lstm state dims (" +
                         std::to_string(state.hidden.dim()) + ", " +
                         std::to_string(state.cell.dim()) +
                         ") for hidden size " + std::to_string(d));
  }
  Expr gates = affine(g.parameter(w.weight), concat({input, state.hidden}),
                      g.parameter(w.bias));
  Expr i = sigmoid(slice(gates, 0, d));
  Expr f = sigmoid(slice(gates, d, d));
  Expr o = sigmoid(slice(gates, 2 * d, d));
  Expr c_hat = tanh(slice(gates, 3 * d, d));
  Expr cell = add(cmult(f, state.cell), cmult(i, c_hat));
  Expr hidden = cmult(o, tanh(cell));
  return LstmState{hidden, cell};
}

void StackLstm::push(Graph& g, Expr input) {
  frames_.push_back(lstm_step(g, weights_, top(), input));
}

void StackLstm::pop() {
  if (frames_.empty()) throw StackUnderflowError("pop on an empty stack LSTM");
  frames_.pop_back();
}

const LstmState& StackLstm::top() const {
  return frames_.empty() ? initial_ : frames_.back();
}

}  // namespace nmtrnng::core
