#include "nmtrnng/decode/greedy.hpp"

#include <cmath>
#include <utility>

#include "nmtrnng/core/errors.hpp"
#include "nmtrnng/core/graph.hpp"
#include "nmtrnng/core/ops.hpp"
#include "nmtrnng/model/translator.hpp"
#include "nmtrnng/rnng/joint.hpp"

namespace nmtrnng::decode {

Translation translate_greedy(const model::Model& model, std::span<const int> source,
                             std::size_t max_length) {
  if (max_length == 0) max_length = default_max_length(source.size());
  core::Graph g(std::as_const(model).parameters());
  const auto encoding = model::encode(g, model, source);
  model::DecoderState state = model::initial_decoder_state(g, model);
  Translation out;
  int prev = model::kEosId;
  while (out.ids.size() < max_length) {
    auto step = model::decoder_step(g, model, state, prev, encoding);
    const auto logp = core::log_softmax(step.logits.value().values());
    const int word = static_cast<int>(core::argmax(logp));
    out.ids.push_back(word);
    out.log_prob += logp[static_cast<std::size_t>(word)];
    state = step.state;
    prev = word;
    if (word == model::kEosId) {
      out.finished = true;
      break;
    }
  }
  return out;
}

std::vector<double> step_log_probs(const model::Model& model, std::span<const int> source,
                                   std::span<const int> target) {
  core::Graph g(std::as_const(model).parameters());
  const auto encoding = model::encode(g, model, source);
  model::DecoderState state = model::initial_decoder_state(g, model);
  std::vector<double> out;
  int prev = model::kEosId;
  for (int word : target) {
    if (word < 0 || static_cast<std::size_t>(word) >= model.config().target_vocab) {
      throw VocabularyError("target id " + std::to_string(word) + " out of range");
    }
    auto step = model::decoder_step(g, model, state, prev, encoding);
    out.push_back(core::log_softmax(step.logits.value().values())[static_cast<std::size_t>(word)]);
    state = step.state;
    prev = word;
  }
  return out;
}

double score_sequence(const model::Model& model, std::span<const int> source,
                      std::span<const int> target) {
  double total = 0.0;
  for (double v : step_log_probs(model, source, target)) total += v;
  return total;
}

std::size_t default_action_budget(std::size_t source_length) {
  return 2 * default_max_length(source_length) - 1;
}

JointOutput translate_and_parse_greedy(const model::Model& model, std::span<const int> source,
                                       std::size_t max_actions) {
  if (max_actions == 0) max_actions = default_action_budget(source.size());
  const std::size_t num_labels = model.config().num_labels;
  core::Graph g(std::as_const(model).parameters());
  const auto encoding = model::encode(g, model, source);
  rnng::JointState state = rnng::initial_joint_state(g, model, std::nullopt);
  JointOutput out;

  while (!state.parser.system.terminal()) {
    if (out.actions.size() >= max_actions) {
      out.partial = true;
      break;
    }
    const auto scores = rnng::action_scores(g, model, state);
    const auto logits = scores.logits.value().values();
    const std::size_t id = core::argmax(logits, scores.legal);
    const auto probs = core::masked_softmax(logits, scores.legal);
    out.log_prob += std::log(probs[id]);
    const rnng::Action action = rnng::action_from_id(id, num_labels);
    if (action.is_shift()) {
      double word_logp = 0.0;
      rnng::apply_shift(g, model, encoding, state, [&](std::span<const double> word_logits) {
        const auto logp = core::log_softmax(word_logits);
        const std::size_t w = core::argmax(logp);
        word_logp = logp[w];
        return static_cast<int>(w);
      });
      out.log_prob += word_logp;
    } else {
      rnng::apply_reduce(g, model, state, action);
    }
    out.actions.push_back(action);
  }
  out.ids = state.words;
  if (!out.partial) out.tree = data::actions_to_tree(out.actions, out.ids.size());
  return out;
}

}  // namespace nmtrnng::decode
