#pragma once

#include <cstddef>
#include <cstdint>

#include "nmtrnng/model/model.hpp"

namespace nmtrnng::train {

struct TrainConfig {
  std::size_t word_dim = 256;
  std::size_t action_dim = 128;
  std::size_t hidden_dim = 256;
  double learning_rate = 1.0;
  double clip_threshold = 3.0;
  std::size_t batch_size = 128;
  std::size_t max_epochs = 10;
  model::Ablation ablation;
  bool with_rnng = true;
  bool shuffle = true;
  // Halve the learning rate and reload the best epoch when dev perplexity
  // rises; off keeps the rate fixed.
  bool lr_schedule = true;
  std::uint64_t seed = 1;

  void validate() const;
  model::ModelConfig model_config(std::size_t source_vocab, std::size_t target_vocab,
                                  std::size_t num_labels) const;
};

}  // namespace nmtrnng::train
