#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nmtrnng/data/dep_tree.hpp"
#include "nmtrnng/decode/beam.hpp"
#include "nmtrnng/model/model.hpp"
#include "nmtrnng/rnng/action.hpp"

namespace nmtrnng::decode {

// Argmax word at every step until EOS or `max_length` (0: default).
Translation translate_greedy(const model::Model& model, std::span<const int> source,
                             std::size_t max_length = 0);

// Teacher-forced sum of log p(y_j | y_<j, x) over the translator alone.
double score_sequence(const model::Model& model, std::span<const int> source,
                      std::span<const int> target);

// Per-step log-probabilities of the same teacher-forced pass.
std::vector<double> step_log_probs(const model::Model& model, std::span<const int> source,
                                   std::span<const int> target);

struct JointOutput {
  std::vector<int> ids;
  rnng::ActionSequence actions;
  std::optional<data::DepTree> tree;  // present when the parse is terminal
  double log_prob = 0.0;              // words and actions
  bool partial = false;               // action budget ran out
};

// 0 selects 2 * default_max_length(source) - 1.
std::size_t default_action_budget(std::size_t source_length);

// Alternates the argmax legal action and, on SHIFT, the argmax word.
JointOutput translate_and_parse_greedy(const model::Model& model, std::span<const int> source,
                                       std::size_t max_actions = 0);

}  // namespace nmtrnng::decode
