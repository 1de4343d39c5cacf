#include "nmtrnng/train/trainer.hpp"

#include <numeric>
#include <sstream>
#include <utility>

#include "nmtrnng/core/errors.hpp"
#include "nmtrnng/core/graph.hpp"
#include "nmtrnng/rnng/joint.hpp"
#include "nmtrnng/train/optimizer.hpp"
#include "nmtrnng/train/schedule.hpp"

namespace nmtrnng::train {

std::vector<Batch> make_batches(std::size_t n, std::size_t batch_size, bool shuffle,
                                std::mt19937_64& rng) {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (shuffle) {
    // Explicit Fisher-Yates: std::shuffle's draw pattern is library-specific.
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(order[i - 1], order[j]);
    }
  }
  std::vector<Batch> batches;
  for (std::size_t i = 0; i < n; i += batch_size) {
    batches.emplace_back(order.begin() + i, order.begin() + std::min(n, i + batch_size));
  }
  return batches;
}

std::size_t accumulate_pair_gradient(model::Model& model, const data::SentencePair& pair,
                                     std::size_t index, double& loss) {
  core::Graph g(model.parameters());
  if (model.has_parser()) {
    if (pair.actions.empty()) {
      throw SupervisionError("training pair " + std::to_string(index) + " has no gold actions");
    }
    rnng::JointLossOptions options;
    options.sentence = "training pair " + std::to_string(index);
    const auto result = rnng::joint_nll(g, model, pair.source, pair.target, pair.actions, options);
    loss = result.total.value()[0];
    g.backward(result.total);
    return result.word_count + result.action_count;
  }
  const auto nll = rnng::translation_nll(g, model, pair.source, pair.target);
  loss = nll.value()[0];
  g.backward(nll);
  return pair.target.size();
}

EpochStats train_epoch(model::Model& model, std::span<const data::SentencePair> pairs,
                       std::span<const Batch> batches, const TrainConfig& config,
                       double learning_rate) {
  EpochStats stats;
  auto& store = model.parameters();
  for (const auto& batch : batches) {
    store.zero_grad();
    for (std::size_t i : batch) {
      if (i >= pairs.size()) throw ConfigError("batch index out of range");
      double loss = 0.0;
      stats.symbols += accumulate_pair_gradient(model, pairs[i], i, loss);
      stats.total_loss += loss;
      ++stats.sentences;
    }
    const auto clip = clip_gradients(store, config.clip_threshold);
    stats.max_grad_norm = std::max(stats.max_grad_norm, clip.norm);
    sgd_step(store, learning_rate);
    ++stats.batches;
  }
  store.zero_grad();
  return stats;
}

std::string EpochRecord::log_line() const {
  std::ostringstream out;
  out.precision(10);
  out << "epoch=" << epoch << " lr=" << learning_rate << " train_loss=" << train.mean_loss()
      << " train_symbols=" << train.symbols << " dev_ppl_words=" << dev.words()
      << " dev_ppl_actions=" << (dev.action_count ? dev.actions() : 0.0)
      << " dev_ppl_joint=" << (dev.action_count ? dev.joint() : dev.words())
      << " dev_ppl=" << dev_perplexity << " reload=" << (reloaded ? reload_epoch : 0)
      << " next_lr=" << next_learning_rate;
  return out.str();
}

std::string serialize_rng(const std::mt19937_64& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

std::mt19937_64 deserialize_rng(const std::string& state) {
  std::mt19937_64 rng;
  std::istringstream in(state);
  in >> rng;
  if (!in) throw ParseError("bad generator state in checkpoint");
  return rng;
}

Trainer::Trainer(model::Model& model, TrainConfig config, std::vector<data::SentencePair> train,
                 std::vector<data::SentencePair> dev)
    : model_(model),
      config_(std::move(config)),
      train_(std::move(train)),
      dev_(std::move(dev)),
      rng_(config_.seed),
      learning_rate_(config_.learning_rate) {
  config_.validate();
  if (train_.empty()) throw ConfigError("training set is empty");
}

void Trainer::resume(const Checkpoint& last, const Checkpoint& best) {
  if (last.model != model_.config()) throw ConfigError("checkpoint model shape differs");
  restore_parameters(model_, last);
  epoch_ = last.epoch;
  learning_rate_ = last.learning_rate;
  history_ = last.perplexity_history;
  rng_ = deserialize_rng(last.rng_state);
  best_ = best;
}

eval::PerplexityReport Trainer::dev_report() const {
  return eval::perplexity(model_, dev_.empty() ? std::span<const data::SentencePair>(train_)
                                               : std::span<const data::SentencePair>(dev_));
}

double Trainer::schedule_value(const eval::PerplexityReport& report) const {
  return report.action_count ? report.joint() : report.words();
}

EpochRecord Trainer::run_epoch() {
  EpochRecord record;
  record.epoch = ++epoch_;
  record.learning_rate = learning_rate_;
  const auto batches = make_batches(train_.size(), config_.batch_size, config_.shuffle, rng_);
  record.train = train_epoch(model_, train_, batches, config_, learning_rate_);
  record.dev = dev_report();
  record.dev_perplexity = schedule_value(record.dev);
  history_.push_back(record.dev_perplexity);

  const auto decision = config_.lr_schedule ? lr_schedule_step(history_, learning_rate_)
                                             : ScheduleDecision{learning_rate_, std::nullopt};
  if (decision.reload_epoch) {
    if (best_.epoch != *decision.reload_epoch) {
      throw Error("best snapshot is epoch " + std::to_string(best_.epoch) + ", schedule wants " +
                  std::to_string(*decision.reload_epoch));
    }
    restore_parameters(model_, best_);
    record.reloaded = true;
    record.reload_epoch = *decision.reload_epoch;
  } else if (epoch_ == 1 || record.dev_perplexity < best_.best_perplexity) {
    best_ = capture(model_);
    best_.epoch = epoch_;
    best_.best_perplexity = record.dev_perplexity;
  }
  learning_rate_ = decision.learning_rate;
  record.next_learning_rate = learning_rate_;

  // Keep the snapshot's schedule fields current so that it is also a valid
  // resume point.
  best_.learning_rate = learning_rate_;
  best_.perplexity_history = history_;
  best_.best_epoch = best_.epoch;
  best_.dev_perplexity = best_.best_perplexity;
  best_.seed = config_.seed;
  best_.rng_state = serialize_rng(rng_);
  best_.vocab_hash = vocab_hash_;
  return record;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint c = capture(model_);
  c.epoch = epoch_;
  c.learning_rate = learning_rate_;
  c.dev_perplexity = history_.empty() ? 0.0 : history_.back();
  c.seed = config_.seed;
  c.rng_state = serialize_rng(rng_);
  c.perplexity_history = history_;
  c.best_epoch = best_.epoch;
  c.best_perplexity = best_.best_perplexity;
  c.vocab_hash = vocab_hash_;
  return c;
}

}  // namespace nmtrnng::train
