#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nmtrnng/core/graph.hpp"
#include "nmtrnng/core/lstm.hpp"
#include "nmtrnng/model/model.hpp"
#include "nmtrnng/model/translator.hpp"
#include "nmtrnng/rnng/action.hpp"
#include "nmtrnng/rnng/arc_standard.hpp"

namespace nmtrnng::rnng {

using core::Expr;
using core::Graph;

struct StackItem {
  Expr composed;  // word embedding, or r_t after a reduce
  int token = 0;  // head token of the subtree
};

// Parser half of the hybrid. The RNNG buffer is the translation decoder, so
// it lives in JointState rather than here.
struct ParserState {
  ArcStandard system = ArcStandard::open_ended();
  core::StackLstm stack;
  std::vector<StackItem> items;
  core::StackLstm history;  // action LSTM, push-only
};

struct JointState {
  model::DecoderState decoder;
  ParserState parser;
  std::vector<int> words;
  std::size_t decoder_steps = 0;
  std::size_t shifts = 0;

  int previous_word() const { return words.empty() ? model::kEosId : words.back(); }
};

// Known target length for teacher forcing, std::nullopt for generation.
JointState initial_joint_state(Graph& g, const model::Model& model,
                               std::optional<std::size_t> target_length);

struct ActionScores {
  Expr logits;                       // W_a f_action(...) + b_a over all actions
  std::vector<std::uint8_t> legal;   // per action id

  // softmax restricted to legal actions
  std::vector<double> probabilities() const;
};

// f_action = tanh(W [s_j; h_stack; h_action] + b), minus the blocks removed
// by the model's ablation flags.
ActionScores action_scores(Graph& g, const model::Model& model, const JointState& state);

std::vector<double> action_distribution(Graph& g, const model::Model& model,
                                        const JointState& state);

struct ShiftOutcome {
  int word = 0;
  Expr logits;  // word logits of the decoder step triggered by this SHIFT
};

using WordChooser = std::function<int(std::span<const double> logits)>;

// SHIFT: steps the decoder once (it only advances on SHIFT), emits a word
// from that step, pushes its shared embedding onto the stack and records
// SHIFT in the action history.
ShiftOutcome apply_shift(Graph& g, const model::Model& model,
                         const model::SourceEncoding& encoding, JointState& state,
                         int word);
ShiftOutcome apply_shift(Graph& g, const model::Model& model,
                         const model::SourceEncoding& encoding, JointState& state,
                         const WordChooser& choose);

// REDUCE-L/R: pops two items, composes r = tanh(W_r [r_dep; r_head; V_a(a)])
// and pushes it under the head token.
void apply_reduce(Graph& g, const model::Model& model, JointState& state, Action action);

struct JointLossOptions {
  bool include_word_loss = true;
  bool include_action_loss = true;
  std::string sentence;  // named in supervision errors
  // Called after every transition.
  std::function<void(const JointState&)> observer;
};

struct JointLoss {
  Expr total;
  Expr words;    // invalid when word loss is excluded
  Expr actions;  // invalid when action loss is excluded
  std::size_t word_count = 0;
  std::size_t action_count = 0;
};

// -log p(y, a | x) under teacher forcing of both words and actions.
JointLoss joint_nll(Graph& g, const model::Model& model, std::span<const int> source,
                    std::span<const int> target, std::span<const Action> actions,
                    const JointLossOptions& options = {});

// -log p(y | x) of the translator alone.
Expr translation_nll(Graph& g, const model::Model& model, std::span<const int> source,
                     std::span<const int> target);

}  // namespace nmtrnng::rnng
