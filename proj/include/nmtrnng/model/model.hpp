#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nmtrnng/core/lstm.hpp"
#include "nmtrnng/core/parameters.hpp"

namespace nmtrnng::model {

// Reserved ids shared by every vocabulary.
inline constexpr int kUnkId = 0;
inline constexpr int kEosId = 1;

// Components whose state can be cut out of the action predictor.
struct Ablation {
  bool without_buffer = false;
  bool without_action = false;
  bool without_stack = false;

  bool operator==(const Ablation&) const = default;
};

// Sets the flag named `name` ("without_buffer", "without_action",
// "without_stack"; dashes are accepted in place of underscores).
void set_ablation_flag(Ablation& ablation, std::string_view name);

struct ModelConfig {
  std::size_t source_vocab = 0;
  std::size_t target_vocab = 0;
  std::size_t num_labels = 0;
  std::size_t word_dim = 256;
  std::size_t action_dim = 128;
  std::size_t hidden_dim = 256;
  // false builds the plain attentional translator without any parser slots.
  bool with_rnng = true;
  // Stack pushes read the decoder's target embedding table.
  bool tie_stack_embeddings = true;
  Ablation ablation;

  std::size_t num_actions() const { return 2 * num_labels + 1; }
  // Input width of the action predictor's hidden layer.
  std::size_t action_feature_dim() const;
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct TranslatorParams {
  core::ParamId source_embedding;  // V_x
  core::ParamId target_embedding;  // V_y, shared with the parser stack
  core::LstmWeights encoder_forward;
  core::LstmWeights encoder_backward;
  core::LstmWeights decoder;       // input [V_y(y); s_tilde]
  core::ParamId attention;         // W_d, (2d x d)
  core::ParamId combine;           // W_c, (d x 3d)
  core::ParamId output_weight;     // W_y, (|V| x d)
  core::ParamId output_bias;
};

struct ParserParams {
  core::ParamId stack_embedding;   // equals target_embedding when tied
  core::ParamId action_embedding;  // V_a, one row per labeled action
  core::LstmWeights stack_lstm;
  core::LstmWeights action_lstm;
  core::ParamId composition;       // W_r, (word x (2 word + action))
  core::ParamId action_hidden_weight;
  core::ParamId action_hidden_bias;
  core::ParamId action_output_weight;  // W_a
  core::ParamId action_output_bias;
};

// Owns every slot of the hybrid translator and parser. Values start at
// zero; train::init_parameters fills them.
class Model {
 public:
  explicit Model(const ModelConfig& config);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& config() const { return config_; }
  core::ParameterStore& parameters() { return store_; }
  const core::ParameterStore& parameters() const { return store_; }

  const TranslatorParams& translator() const { return translator_; }
  const ParserParams& parser() const;
  bool has_parser() const { return config_.with_rnng; }

  // Stack, action history, composition and action-output slots: everything
  // that translation-only decoding must never read.
  std::vector<core::ParamId> parser_only_parameters() const;

 private:
  ModelConfig config_;
  core::ParameterStore store_;
  TranslatorParams translator_;
  ParserParams parser_;
};

}  // namespace nmtrnng::model
