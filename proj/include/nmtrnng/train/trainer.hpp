#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nmtrnng/data/corpus.hpp"
#include "nmtrnng/eval/perplexity.hpp"
#include "nmtrnng/model/model.hpp"
#include "nmtrnng/train/checkpoint.hpp"
#include "nmtrnng/train/config.hpp"

namespace nmtrnng::train {

using Batch = std::vector<std::size_t>;

// Splits [0, n) into consecutive batches, after a Fisher-Yates shuffle
// driven by `rng` when `shuffle` is set.
std::vector<Batch> make_batches(std::size_t n, std::size_t batch_size, bool shuffle,
                                std::mt19937_64& rng);

struct EpochStats {
  double total_loss = 0.0;
  std::size_t sentences = 0;
  std::size_t symbols = 0;
  std::size_t batches = 0;
  double max_grad_norm = 0.0;

  double mean_loss() const { return sentences ? total_loss / sentences : 0.0; }
};

// Summed loss of one pair: joint when the model has a parser, translation
// otherwise. Returns the symbol count scored.
std::size_t accumulate_pair_gradient(model::Model& model, const data::SentencePair& pair,
                                     std::size_t index, double& loss);

// For each batch: sum the per-sentence losses, backpropagate, clip the
// global norm to `config.clip_threshold` and take one SGD step.
EpochStats train_epoch(model::Model& model, std::span<const data::SentencePair> pairs,
                       std::span<const Batch> batches, const TrainConfig& config,
                       double learning_rate);

struct EpochRecord {
  std::size_t epoch = 0;
  double learning_rate = 0.0;  // used during the epoch
  EpochStats train;
  eval::PerplexityReport dev;
  double dev_perplexity = 0.0;  // the value driving the schedule
  bool reloaded = false;
  std::size_t reload_epoch = 0;
  double next_learning_rate = 0.0;

  // key=value record
  std::string log_line() const;
};

// Epoch loop with the dev-perplexity schedule. Dev perplexity is joint
// (words + actions) when the model has a parser and the dev pairs carry
// actions, word-level otherwise. An empty dev set falls back to the
// training pairs.
class Trainer {
 public:
  Trainer(model::Model& model, TrainConfig config, std::vector<data::SentencePair> train,
          std::vector<data::SentencePair> dev);

  // Continues from the state saved after an earlier epoch; `best` holds the
  // parameters of the best epoch so far.
  void resume(const Checkpoint& last, const Checkpoint& best);

  EpochRecord run_epoch();
  bool finished() const { return epoch_ >= config_.max_epochs; }

  std::size_t epoch() const { return epoch_; }
  double learning_rate() const { return learning_rate_; }
  const std::vector<double>& history() const { return history_; }
  const Checkpoint& best() const { return best_; }
  // Current parameters and schedule state.
  Checkpoint checkpoint() const;

  void set_vocab_hash(std::uint64_t hash) { vocab_hash_ = hash; }

 private:
  eval::PerplexityReport dev_report() const;
  double schedule_value(const eval::PerplexityReport& report) const;

  model::Model& model_;
  TrainConfig config_;
  std::vector<data::SentencePair> train_;
  std::vector<data::SentencePair> dev_;
  std::mt19937_64 rng_;
  std::size_t epoch_ = 0;
  double learning_rate_;
  std::vector<double> history_;
  Checkpoint best_;
  std::uint64_t vocab_hash_ = 0;
};

std::string serialize_rng(const std::mt19937_64& rng);
std::mt19937_64 deserialize_rng(const std::string& state);

}  // namespace nmtrnng::train
