#include "nmtrnng/train/config.hpp"

#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::train {

void TrainConfig::validate() const {
  if (word_dim == 0 || action_dim == 0 || hidden_dim == 0) {
    throw ConfigError("model dimensions must be positive");
  }
  if (!(learning_rate >= 0.0)) throw ConfigError("learning rate must be non-negative");
  if (!(clip_threshold > 0.0)) throw ConfigError("clip threshold must be positive");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (max_epochs == 0) throw ConfigError("max epochs must be positive");
}

model::ModelConfig TrainConfig::model_config(std::size_t source_vocab, std::size_t target_vocab,
                                             std::size_t num_labels) const {
  model::ModelConfig m;
  m.source_vocab = source_vocab;
  m.target_vocab = target_vocab;
  m.num_labels = num_labels;
  m.word_dim = word_dim;
  m.action_dim = action_dim;
  m.hidden_dim = hidden_dim;
  m.with_rnng = with_rnng;
  m.ablation = ablation;
  return m;
}

}  // namespace nmtrnng::train
