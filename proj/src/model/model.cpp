#include "nmtrnng/model/model.hpp"

#include <string>

#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::model {

using core::ParamRole;

void set_ablation_flag(Ablation& ablation, std::string_view name) {
  std::string key(name);
  for (auto& ch : key) {
    if (ch == '-') ch = '_';
  }
  if (key == "without_buffer") {
    ablation.without_buffer = true;
  } else if (key == "without_action") {
    ablation.without_action = true;
  } else if (key == "without_stack") {
    ablation.without_stack = true;
  } else {
    throw ConfigError("unknown ablation flag '" + std::string(name) + "'");
  }
}

std::size_t ModelConfig::action_feature_dim() const {
  std::size_t n = 0;
  if (!ablation.without_buffer) n += hidden_dim;
  if (!ablation.without_stack) n += hidden_dim;
  if (!ablation.without_action) n += hidden_dim;
  return n;
}

void ModelConfig::validate() const {
  if (source_vocab < 2 || target_vocab < 2) {
    throw ConfigError("vocabularies must hold at least the reserved UNK and EOS");
  }
  if (word_dim == 0 || hidden_dim == 0 || action_dim == 0) {
    throw ConfigError("model dimensions must be positive");
  }
  if (with_rnng && num_labels == 0) {
    throw ConfigError("a parser needs at least one dependency label");
  }
}

Model::Model(const ModelConfig& config) : config_(config) {
  config_.validate();
  const std::size_t w = config_.word_dim;
  const std::size_t d = config_.hidden_dim;
  auto& t = translator_;
  t.source_embedding =
      store_.add("source_embedding", {config_.source_vocab, w}, ParamRole::kEmbedding);
  t.target_embedding =
      store_.add("target_embedding", {config_.target_vocab, w}, ParamRole::kEmbedding);
  t.encoder_forward = core::add_lstm(store_, "encoder_forward", w, d);
  t.encoder_backward = core::add_lstm(store_, "encoder_backward", w, d);
  t.decoder = core::add_lstm(store_, "decoder", w + d, d);
  t.attention = store_.add("attention", {2 * d, d});
  t.combine = store_.add("combine", {d, 3 * d});
  t.output_weight =
      store_.add("output_weight", {config_.target_vocab, d}, ParamRole::kOutputWeight);
  t.output_bias = store_.add("output_bias", {config_.target_vocab}, ParamRole::kBias);

  if (!config_.with_rnng) return;
  const std::size_t a = config_.action_dim;
  auto& p = parser_;
  p.stack_embedding =
      config_.tie_stack_embeddings
          ? t.target_embedding
          : store_.add("stack_embedding", {config_.target_vocab, w},
                       ParamRole::kEmbedding);
  p.action_embedding =
      store_.add("action_embedding", {config_.num_actions(), a}, ParamRole::kEmbedding);
  p.stack_lstm = core::add_lstm(store_, "stack_lstm", w, d);
  p.action_lstm = core::add_lstm(store_, "action_lstm", a, d);
  p.composition = store_.add("composition", {w, 2 * w + a});
  p.action_hidden_weight =
      store_.add("action_hidden_weight", {d, config_.action_feature_dim()});
  p.action_hidden_bias = store_.add("action_hidden_bias", {d}, ParamRole::kBias);
  p.action_output_weight = store_.add(
      "action_output_weight", {config_.num_actions(), d}, ParamRole::kOutputWeight);
  p.action_output_bias =
      store_.add("action_output_bias", {config_.num_actions()}, ParamRole::kBias);
}

const ParserParams& Model::parser() const {
  if (!config_.with_rnng) throw ConfigError("model was built without a parser");
  return parser_;
}

std::vector<core::ParamId> Model::parser_only_parameters() const {
  if (!config_.with_rnng) return {};
  const auto& p = parser_;
  std::vector<core::ParamId> ids = {
      p.action_embedding,       p.stack_lstm.weight,   p.stack_lstm.bias,
      p.action_lstm.weight,     p.action_lstm.bias,    p.composition,
      p.action_hidden_weight,   p.action_hidden_bias,  p.action_output_weight,
      p.action_output_bias};
  if (!config_.tie_stack_embeddings) ids.push_back(p.stack_embedding);
  return ids;
}

}  // namespace nmtrnng::model
