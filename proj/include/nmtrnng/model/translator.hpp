#pragma once

#include <span>
#include <vector>

#include "nmtrnng/core/graph.hpp"
#include "nmtrnng/core/lstm.hpp"
#include "nmtrnng/model/model.hpp"

namespace nmtrnng::model {

using core::Expr;
using core::Graph;

// h_i = [forward_i ; backward_i] for every source position.
struct SourceEncoding {
  std::vector<Expr> states;
  std::vector<Expr> forward;
  std::vector<Expr> backward;

  std::size_t length() const { return states.size(); }
};

struct Attention {
  Expr weights;  // alpha over source positions
  Expr context;  // sum_i alpha_i h_i
};

struct DecoderState {
  core::LstmState recurrent;  // s_j
  Expr combined;              // s_tilde_j
  Expr context;               // c_j
  Expr attention;             // alpha_{., j}; invalid before the first step
};

struct DecoderOutput {
  DecoderState state;
  Expr logits;  // W_y s_tilde_j + b_y
};

SourceEncoding encode(Graph& g, const Model& model, std::span<const int> source);

// Bilinear score h_i^T W_d s, softmax over positions, weighted sum.
Attention attend(Graph& g, const Model& model, Expr query,
                 const SourceEncoding& encoding);

// s_0 = s_tilde_0 = 0.
DecoderState initial_decoder_state(Graph& g, const Model& model);

// One step of the conditional language model:
//   s_j       = LSTM(s_{j-1}, [V_y(y_{j-1}); s_tilde_{j-1}])
//   s_tilde_j = tanh(W_c [s_j; c_j])
// with y_0 = EOS.
DecoderOutput decoder_step(Graph& g, const Model& model, const DecoderState& prev,
                           int prev_word, const SourceEncoding& encoding);

std::vector<double> word_distribution(const DecoderOutput& out);

}  // namespace nmtrnng::model
