#include "nmtrnng/model/translator.hpp"

#include <string>

#include "nmtrnng/core/errors.hpp"
#include "nmtrnng/core/ops.hpp"

namespace nmtrnng::model {

namespace {

void check_id(int id, std::size_t vocab, const char* side) {
  if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
    throw VocabularyError(std::string(side) + " id " + std::to_string(id) +
                          " outside vocabulary of size " + std::to_string(vocab));
  }
}

}  // namespace

SourceEncoding encode(Graph& g, const Model& model, std::span<const int> source) {
  if (source.empty()) throw VocabularyError("cannot encode an empty source sentence");
  const auto& p = model.translator();
  const std::size_t n = source.size();
  std::vector<Expr> embedded;
  embedded.reserve(n);
  for (int id : source) {
    check_id(id, model.config().source_vocab, "source");
    embedded.push_back(g.lookup(p.source_embedding, static_cast<std::size_t>(id)));
  }
  SourceEncoding enc;
  enc.forward.resize(n);
  enc.backward.resize(n);
  core::LstmState state = core::zero_state(g, model.config().hidden_dim);
  for (std::size_t i = 0; i < n; ++i) {
    state = core::lstm_step(g, p.encoder_forward, state, embedded[i]);
    enc.forward[i] = state.hidden;
  }
  state = core::zero_state(g, model.config().hidden_dim);
  for (std::size_t i = n; i-- > 0;) {
    state = core::lstm_step(g, p.encoder_backward, state, embedded[i]);
    enc.backward[i] = state.hidden;
  }
  enc.states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    enc.states.push_back(core::concat({enc.forward[i], enc.backward[i]}));
  }
  return enc;
}

Attention attend(Graph& g, const Model& model, Expr query,
                 const SourceEncoding& encoding) {
  Expr projected = core::matvec(g.parameter(model.translator().attention), query);
  std::vector<Expr> scores;
  scores.reserve(encoding.length());
  for (const Expr& h : encoding.states) scores.push_back(core::dot(h, projected));
  Expr weights = core::softmax(core::concat(scores));
  return Attention{weights, core::weighted_sum(encoding.states, weights)};
}

DecoderState initial_decoder_state(Graph& g, const Model& model) {
  const std::size_t d = model.config().hidden_dim;
  DecoderState s;
  s.recurrent = core::zero_state(g, d);
  s.combined = g.zeros(d);
  s.context = g.zeros(2 * d);
  return s;
}

DecoderOutput decoder_step(Graph& g, const Model& model, const DecoderState& prev,
                           int prev_word, const SourceEncoding& encoding) {
  const auto& p = model.translator();
  check_id(prev_word, model.config().target_vocab, "target");
  Expr input = core::concat(
      {g.lookup(p.target_embedding, static_cast<std::size_t>(prev_word)),
       prev.combined});
  DecoderOutput out;
  out.state.recurrent = core::lstm_step(g, p.decoder, prev.recurrent, input);
  Attention att = attend(g, model, out.state.recurrent.hidden, encoding);
  out.state.attention = att.weights;
  out.state.context = att.context;
  out.state.combined = core::tanh(core::matvec(
      g.parameter(p.combine), core::concat({out.state.recurrent.hidden, att.context})));
  out.logits = core::affine(g.parameter(p.output_weight), out.state.combined,
                            g.parameter(p.output_bias));
  return out;
}

std::vector<double> word_distribution(const DecoderOutput& out) {
  return core::softmax(out.logits.value().values());
}

}  // namespace nmtrnng::model
