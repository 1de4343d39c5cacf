#include "nmtrnng/rnng/joint.hpp"

#include <string>

#include "nmtrnng/core/errors.hpp"
#include "nmtrnng/core/ops.hpp"

namespace nmtrnng::rnng {

namespace {

void check_gating(const JointState& state) {
  if (state.decoder_steps != state.shifts || state.words.size() != state.shifts) {
    throw Error("decoder advanced without a matching SHIFT");
  }
}

void push_history(Graph& g, const model::Model& model, JointState& state, Action a) {
  const auto& p = model.parser();
  state.parser.history.push(
      g, g.lookup(p.action_embedding, action_id(a, model.config().num_labels)));
}

}  // namespace

JointState initial_joint_state(Graph& g, const model::Model& model,
                               std::optional<std::size_t> target_length) {
  const auto& p = model.parser();
  const std::size_t d = model.config().hidden_dim;
  JointState s;
  s.decoder = model::initial_decoder_state(g, model);
  s.parser.system = target_length ? ArcStandard::with_length(*target_length)
                                  : ArcStandard::open_ended();
  s.parser.stack = core::StackLstm(p.stack_lstm, core::zero_state(g, d));
  s.parser.history = core::StackLstm(p.action_lstm, core::zero_state(g, d));
  return s;
}

std::vector<double> ActionScores::probabilities() const {
  return core::masked_softmax(logits.value().values(), legal);
}

ActionScores action_scores(Graph& g, const model::Model& model, const JointState& state) {
  const auto& cfg = model.config();
  const auto& p = model.parser();
  std::vector<Expr> features;
  if (!cfg.ablation.without_buffer) features.push_back(state.decoder.recurrent.hidden);
  if (!cfg.ablation.without_stack) features.push_back(state.parser.stack.top().hidden);
  if (!cfg.ablation.without_action) features.push_back(state.parser.history.top().hidden);
  Expr bias = g.parameter(p.action_hidden_bias);
  Expr hidden = features.empty()
                    ? core::tanh(bias)
                    : core::tanh(core::affine(g.parameter(p.action_hidden_weight),
                                              core::concat(features), bias));
  ActionScores scores;
  scores.logits = core::affine(g.parameter(p.action_output_weight), hidden,
                               g.parameter(p.action_output_bias));
  const ActionKindSet kinds = state.parser.system.legal();
  if (kinds.empty() && !state.parser.system.terminal()) {
    throw Error("no legal action in a non-terminal parser state");
  }
  scores.legal = legal_mask(kinds, cfg.num_labels);
  return scores;
}

std::vector<double> action_distribution(Graph& g, const model::Model& model,
                                        const JointState& state) {
  return action_scores(g, model, state).probabilities();
}

ShiftOutcome apply_shift(Graph& g, const model::Model& model,
                         const model::SourceEncoding& encoding, JointState& state,
                         const WordChooser& choose) {
  if (!state.parser.system.legal().shift) {
    throw TransitionError("SHIFT is not legal after " +
                          std::to_string(state.shifts) + " shifted words");
  }
  model::DecoderOutput step =
      model::decoder_step(g, model, state.decoder, state.previous_word(), encoding);
  const int word = choose(step.logits.value().values());
  if (word < 0 || static_cast<std::size_t>(word) >= model.config().target_vocab) {
    throw VocabularyError("shifted word id " + std::to_string(word) + " out of range");
  }
  state.decoder = step.state;
  ++state.decoder_steps;

  Expr embedded = g.lookup(model.parser().stack_embedding, static_cast<std::size_t>(word));
  state.parser.system.apply(Action::shift(), word == model::kEosId);
  state.parser.stack.push(g, embedded);
  state.parser.items.push_back(
      StackItem{embedded, static_cast<int>(state.parser.system.shifted() - 1)});
  push_history(g, model, state, Action::shift());
  state.words.push_back(word);
  ++state.shifts;
  check_gating(state);
  return ShiftOutcome{word, step.logits};
}

ShiftOutcome apply_shift(Graph& g, const model::Model& model,
                         const model::SourceEncoding& encoding, JointState& state,
                         int word) {
  return apply_shift(g, model, encoding, state,
                     [word](std::span<const double>) { return word; });
}

void apply_reduce(Graph& g, const model::Model& model, JointState& state, Action action) {
  if (action.is_shift()) throw TransitionError("apply_reduce given SHIFT");
  auto& parser = state.parser;
  if (parser.items.size() < 2) {
    throw TransitionError("reduce needs two stack items, have " +
                          std::to_string(parser.items.size()));
  }
  const std::size_t id = action_id(action, model.config().num_labels);
  parser.system.apply(action);

  const StackItem top = parser.items.back();
  parser.items.pop_back();
  const StackItem below = parser.items.back();
  parser.items.pop_back();
  parser.stack.pop();
  parser.stack.pop();

  const bool left = action.kind == ActionKind::kReduceLeft;
  const StackItem& head = left ? top : below;
  const StackItem& dependent = left ? below : top;
  const auto& p = model.parser();
  Expr composed = core::tanh(core::matvec(
      g.parameter(p.composition),
      core::concat({dependent.composed, head.composed, g.lookup(p.action_embedding, id)})));
  parser.stack.push(g, composed);
  parser.items.push_back(StackItem{composed, head.token});
  push_history(g, model, state, action);
}

JointLoss joint_nll(Graph& g, const model::Model& model, std::span<const int> source,
                    std::span<const int> target, std::span<const Action> actions,
                    const JointLossOptions& options) {
  std::size_t shift_count = 0;
  for (const Action& a : actions) shift_count += a.is_shift();
  if (shift_count != target.size()) {
    throw SupervisionError("sentence " + (options.sentence.empty() ? "?" : options.sentence) +
                           ": " + std::to_string(shift_count) + " SHIFT actions for " +
                           std::to_string(target.size()) + " target words");
  }
  const model::SourceEncoding encoding = model::encode(g, model, source);
  JointState state = initial_joint_state(g, model, target.size());

  std::vector<Expr> word_terms;
  std::vector<Expr> action_terms;
  std::vector<Expr> all_terms;
  std::size_t next_word = 0;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    const Action a = actions[t];
    if (!state.parser.system.legal().contains(a.kind)) {
      throw TransitionError("sentence " + options.sentence + ": illegal gold action at step " +
                            std::to_string(t));
    }
    if (options.include_action_loss) {
      ActionScores scores = action_scores(g, model, state);
      Expr term = core::pick_neg_log_softmax(
          scores.logits, action_id(a, model.config().num_labels), scores.legal);
      action_terms.push_back(term);
      all_terms.push_back(term);
    }
    if (a.is_shift()) {
      ShiftOutcome out = apply_shift(g, model, encoding, state, target[next_word]);
      if (options.include_word_loss) {
        Expr term = core::pick_neg_log_softmax(
            out.logits, static_cast<std::size_t>(target[next_word]));
        word_terms.push_back(term);
        all_terms.push_back(term);
      }
      ++next_word;
    } else {
      apply_reduce(g, model, state, a);
    }
    if (options.observer) options.observer(state);
  }
  if (!state.parser.system.terminal()) {
    throw SupervisionError("sentence " + options.sentence +
                           ": gold action sequence does not complete the tree");
  }

  JointLoss loss;
  loss.word_count = options.include_word_loss ? target.size() : 0;
  loss.action_count = options.include_action_loss ? actions.size() : 0;
  if (!word_terms.empty()) loss.words = core::sum(word_terms);
  if (!action_terms.empty()) loss.actions = core::sum(action_terms);
  loss.total = all_terms.empty() ? g.zeros(1) : core::sum(all_terms);
  return loss;
}

Expr translation_nll(Graph& g, const model::Model& model, std::span<const int> source,
                     std::span<const int> target) {
  if (target.empty()) throw SupervisionError("empty target sentence");
  const model::SourceEncoding encoding = model::encode(g, model, source);
  model::DecoderState state = model::initial_decoder_state(g, model);
  std::vector<Expr> terms;
  int previous = model::kEosId;
  for (int word : target) {
    model::DecoderOutput out = model::decoder_step(g, model, state, previous, encoding);
    terms.push_back(core::pick_neg_log_softmax(out.logits, static_cast<std::size_t>(word)));
    state = out.state;
    previous = word;
  }
  return core::sum(terms);
}

}  // namespace nmtrnng::rnng
