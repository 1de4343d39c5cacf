#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nmtrnng/core/graph.hpp"
#include "nmtrnng/core/parameters.hpp"

namespace nmtrnng::core {

// Single-layer LSTM without peepholes. `weight` is (4d x (in + d)) acting on
// [x; h], `bias` is 4d; gate blocks are stacked in the order i, f, o, g.
//   i, f, o = sigmoid(.)   g = tanh(.)
//   c' = f * c + i * g     h' = o * tanh(c')
struct LstmWeights {
  ParamId weight;
  ParamId bias;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
};

enum class LstmGate : std::size_t { kInput = 0, kForget = 1, kOutput = 2, kCell = 3 };

LstmWeights add_lstm(ParameterStore& store, const std::string& prefix,
                     std::size_t input_dim, std::size_t hidden_dim);

struct LstmState {
  Expr hidden;
  Expr cell;
};

LstmState zero_state(Graph& g, std::size_t hidden_dim);

LstmState lstm_step(Graph& g, const LstmWeights& w, const LstmState& state,
                    Expr input);

// An LSTM whose history is a stack: push runs one step from the current top,
// pop restores the previous top exactly. Frames are kept whole so restoring
// is a plain pop.
class StackLstm {
 public:
  StackLstm() = default;
  StackLstm(const LstmWeights& weights, LstmState initial)
      : weights_(weights), initial_(initial) {}

  void push(Graph& g, Expr input);
  void pop();
  const LstmState& top() const;

  std::size_t depth() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }
  const std::vector<LstmState>& frames() const { return frames_; }
  const LstmWeights& weights() const { return weights_; }

 private:
  LstmWeights weights_;
  LstmState initial_;
  std::vector<LstmState> frames_;
};

}  // namespace nmtrnng::core
