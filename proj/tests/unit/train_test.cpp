#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "nmtrnng/cli/toy.hpp"
#include "nmtrnng/core/errors.hpp"
#include "nmtrnng/decode/greedy.hpp"
#include "nmtrnng/eval/perplexity.hpp"
#include "nmtrnng/model/translator.hpp"
#include "nmtrnng/rnng/joint.hpp"
#include "nmtrnng/train/checkpoint.hpp"
#include "nmtrnng/train/init.hpp"
#include "nmtrnng/train/optimizer.hpp"
#include "nmtrnng/train/schedule.hpp"
#include "nmtrnng/train/trainer.hpp"
#include "test_support.hpp"

using namespace nmtrnng;
using core::ParamRole;
using support::tiny_config;

namespace {

train::TrainConfig small_train_config(std::size_t dim, std::size_t epochs) {
  train::TrainConfig c;
  c.word_dim = c.action_dim = c.hidden_dim = dim;
  c.max_epochs = epochs;
  c.batch_size = 4;
  c.learning_rate = 0.5;
  c.seed = 11;
  return c;
}

std::vector<double> all_values(const core::ParameterStore& store) {
  std::vector<double> out;
  for (const auto& p : store) out.insert(out.end(), p.value.values().begin(), p.value.values().end());
  return out;
}

}  // namespace

TEST(Init, RolesGetTheirRanges) {
  model::Model m(tiny_config(9, 5, 2));
  train::init_parameters(m, 4);
  const std::size_t h = m.config().hidden_dim;
  for (const auto& p : m.parameters()) {
    const auto v = p.value.values();
    switch (p.role) {
      case ParamRole::kWeight:
      case ParamRole::kEmbedding: {
        double max_abs = 0;
        for (double x : v) max_abs = std::max(max_abs, std::abs(x));
        EXPECT_LE(max_abs, train::kInitRange) << p.name;
        EXPECT_GT(max_abs, 0.0) << p.name;
        break;
      }
      case ParamRole::kBias:
      case ParamRole::kOutputWeight:
        for (double x : v) EXPECT_EQ(x, 0.0) << p.name;
        break;
      case ParamRole::kLstmBias:
        ASSERT_EQ(v.size(), 4 * h) << p.name;
        for (std::size_t i = 0; i < v.size(); ++i) {
          EXPECT_EQ(v[i], (i >= h && i < 2 * h) ? 1.0 : 0.0) << p.name << "[" << i << "]";
        }
        break;
    }
  }
}

TEST(Init, FirstWordDistributionIsUniform) {
  model::Model m(tiny_config(7, 4, 2, false));
  train::init_parameters(m, 9);
  core::Graph g(std::as_const(m).parameters());
  const std::vector<int> src{2, 3, model::kEosId};
  const auto enc = model::encode(g, m, src);
  const auto out = model::decoder_step(g, m, model::initial_decoder_state(g, m), model::kEosId, enc);
  for (double p : model::word_distribution(out)) EXPECT_NEAR(p, 1.0 / 7.0, 1e-15);
}

TEST(Init, SameSeedSameValues) {
  model::Model a(tiny_config(9, 5));
  model::Model b(tiny_config(9, 5));
  train::init_parameters(a, 21);
  train::init_parameters(b, 21);
  EXPECT_EQ(all_values(a.parameters()), all_values(b.parameters()));
}

TEST(ClipGradients, ScalesToThreshold) {
  core::ParameterStore store;
  const auto id = store.add("w", {2});
  store[id].grad = core::Tensor::vector({3.0, 4.0});
  const auto r = train::clip_gradients(store, 3.0);
  EXPECT_DOUBLE_EQ(r.norm, 5.0);
  EXPECT_NEAR(store[id].grad[0], 1.8, 1e-12);
  EXPECT_NEAR(store[id].grad[1], 2.4, 1e-12);
}

TEST(ClipGradients, BelowThresholdUnchanged) {
  core::ParameterStore store;
  const auto id = store.add("w", {1});
  store[id].grad = core::Tensor::vector({2.9});
  const auto r = train::clip_gradients(store, 3.0);
  EXPECT_EQ(r.scale, 1.0);
  EXPECT_EQ(store[id].grad[0], 2.9);
}

TEST(ClipGradients, DirectionPreservedAcrossSlots) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    core::ParameterStore store;
    const auto a = store.add("a", {3, 4});
    const auto b = store.add("b", {7});
    store[a].grad = support::random_tensor(rng, {3, 4}, 10.0);
    store[b].grad = support::random_tensor(rng, {7}, 10.0);
    std::vector<double> before;
    for (const auto& p : store) before.insert(before.end(), p.grad.values().begin(), p.grad.values().end());
    const double tau = 0.5 + trial * 0.1;
    train::clip_gradients(store, tau);
    std::vector<double> after;
    for (const auto& p : store) after.insert(after.end(), p.grad.values().begin(), p.grad.values().end());
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < before.size(); ++i) {
      dot += before[i] * after[i];
      na += before[i] * before[i];
      nb += after[i] * after[i];
    }
    EXPECT_NEAR(dot / std::sqrt(na * nb), 1.0, 1e-12);
    EXPECT_LE(std::sqrt(nb), tau + 1e-12);
  }
}

TEST(ClipGradients, NonFiniteNamesSlot) {
  core::ParameterStore store;
  store.add("fine", {1});
  const auto bad = store.add("broken", {2});
  store[bad].grad[1] = std::numeric_limits<double>::quiet_NaN();
  try {
    train::clip_gradients(store, 1.0);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("broken"), std::string::npos) << e.what();
  }
}

TEST(Sgd, ZeroLearningRateLeavesParameters) {
  const auto toy = cli::make_toy_data(4, 4, 8, 8, 2, 3);
  model::Model m(cli::toy_model_config(toy, 4));
  train::init_parameters(m, 1);
  const auto before = all_values(m.parameters());
  auto config = small_train_config(4, 1);
  std::mt19937_64 rng(1);
  const auto batches = train::make_batches(toy.pairs.size(), 2, true, rng);
  const auto stats = train::train_epoch(m, toy.pairs, batches, config, 0.0);
  EXPECT_GT(stats.total_loss, 0.0);
  EXPECT_EQ(all_values(m.parameters()), before);
}

TEST(Sgd, SmallStepsDecreaseLoss) {
  const auto toy = cli::make_toy_data(1, 4, 8, 8, 2, 5);
  model::Model m(cli::toy_model_config(toy, 6));
  support::randomize(m, 3, 0.3);
  auto config = small_train_config(6, 1);
  const std::vector<train::Batch> batches{{0}};
  double previous = std::numeric_limits<double>::infinity();
  for (int step = 0; step < 20; ++step) {
    const auto stats = train::train_epoch(m, toy.pairs, batches, config, 0.01);
    EXPECT_LE(stats.total_loss, previous) << "step " << step;
    previous = stats.total_loss;
  }
}

TEST(Batches, CoverEveryIndexOnce) {
  std::mt19937_64 rng(2);
  const auto batches = train::make_batches(10, 3, true, rng);
  ASSERT_EQ(batches.size(), 4u);
  EXPECT_EQ(batches.back().size(), 1u);
  std::vector<int> seen(10, 0);
  for (const auto& b : batches) {
    for (auto i : b) ++seen[i];
  }
  for (int s : seen) EXPECT_EQ(s, 1);
  const auto plain = train::make_batches(5, 2, false, rng);
  EXPECT_EQ(plain[0], (train::Batch{0, 1}));
}

TEST(Trainer, MemorizesSinglePair) {
  const auto toy = cli::make_toy_data(1, 4, 8, 8, 2, 13);
  model::Model m(cli::toy_model_config(toy, 8));
  auto config = small_train_config(8, 500);
  config.lr_schedule = false;
  train::init_parameters(m, config.seed);
  train::Trainer trainer(m, config, toy.pairs, toy.pairs);
  while (!trainer.finished()) trainer.run_epoch();
  const auto report = eval::perplexity(m, toy.pairs);
  EXPECT_LT(report.joint(), 1.05);
}

TEST(Trainer, SameSeedBitIdentical) {
  const auto toy = cli::make_toy_data(6, 4, 8, 8, 2, 17);
  auto config = small_train_config(4, 3);
  config.batch_size = 2;
  auto run = [&]() {
    model::Model m(cli::toy_model_config(toy, 4));
    train::init_parameters(m, config.seed);
    train::Trainer t(m, config, toy.pairs, toy.pairs);
    while (!t.finished()) t.run_epoch();
    return t.checkpoint();
  };
  EXPECT_EQ(run(), run());
}

TEST(Trainer, ResumeMatchesUninterruptedRun) {
  const auto toy = cli::make_toy_data(6, 4, 8, 8, 2, 19);
  const std::vector<data::SentencePair> dev(toy.pairs.begin(), toy.pairs.begin() + 2);
  auto config = small_train_config(4, 4);
  config.batch_size = 2;
  config.learning_rate = 2.0;

  model::Model straight(cli::toy_model_config(toy, 4));
  train::init_parameters(straight, config.seed);
  train::Trainer full(straight, config, toy.pairs, dev);
  std::vector<train::Checkpoint> lasts, bests;
  while (!full.finished()) {
    full.run_epoch();
    lasts.push_back(full.checkpoint());
    bests.push_back(full.best());
  }

  model::Model resumed(cli::toy_model_config(toy, 4));
  train::Trainer second(resumed, config, toy.pairs, dev);
  std::stringstream last_buf, best_buf;
  train::save_checkpoint(last_buf, lasts[1]);
  train::save_checkpoint(best_buf, bests[1]);
  second.resume(train::load_checkpoint(last_buf), train::load_checkpoint(best_buf));
  EXPECT_EQ(second.epoch(), 2u);
  while (!second.finished()) second.run_epoch();
  EXPECT_EQ(second.checkpoint(), lasts.back());
  EXPECT_EQ(second.best(), bests.back());
}

TEST(Trainer, LogLineIsKeyValue) {
  const auto toy = cli::make_toy_data(3, 3, 8, 8, 2, 23);
  auto config = small_train_config(4, 1);
  model::Model m(cli::toy_model_config(toy, 4));
  train::init_parameters(m, 1);
  train::Trainer t(m, config, toy.pairs, {});
  const auto line = t.run_epoch().log_line();
  for (const char* key : {"epoch=1", "lr=", "train_loss=", "dev_ppl="}) {
    EXPECT_NE(line.find(key), std::string::npos) << line;
  }
}

TEST(Schedule, DecreasingKeepsRate) {
  const std::vector<double> h{10, 9, 8};
  const auto d = train::lr_schedule_step(h, 1.0);
  EXPECT_EQ(d.learning_rate, 1.0);
  EXPECT_FALSE(d.halved());
}

TEST(Schedule, EqualityIsNotARise) {
  const std::vector<double> h{10, 9, 9};
  EXPECT_FALSE(train::lr_schedule_step(h, 1.0).halved());
}

TEST(Schedule, RiseHalvesAndReloadsBest) {
  const std::vector<double> h{10, 9, 9.5};
  const auto d = train::lr_schedule_step(h, 1.0);
  EXPECT_EQ(d.learning_rate, 0.5);
  ASSERT_TRUE(d.reload_epoch.has_value());
  EXPECT_EQ(*d.reload_epoch, 2u);
}

TEST(Schedule, EarliestBestIsReloaded) {
  const std::vector<double> h{9, 10, 9, 9.2};
  EXPECT_EQ(*train::lr_schedule_step(h, 1.0).reload_epoch, 1u);
}

TEST(Schedule, TwoRisesQuarterTheRate) {
  double lr = 1.0;
  std::vector<double> h{10, 9, 9.5};
  lr = train::lr_schedule_step(h, lr).learning_rate;
  h.push_back(9.7);
  const auto d = train::lr_schedule_step(h, lr);
  EXPECT_EQ(d.learning_rate, 0.25);
  EXPECT_EQ(*d.reload_epoch, 2u);
}

TEST(Schedule, ResolvesCheckpoint) {
  std::vector<train::Checkpoint> ckpts(3);
  for (std::size_t i = 0; i < 3; ++i) ckpts[i].epoch = i + 1;
  const std::vector<double> h{10, 9, 9.5};
  const auto out = train::lr_schedule_step(h, 1.0, ckpts);
  ASSERT_NE(out.reload, nullptr);
  EXPECT_EQ(out.reload->epoch, 2u);
  EXPECT_THROW(train::lr_schedule_step(h, 1.0, std::span(ckpts).subspan(2)), ConfigError);
  EXPECT_THROW(train::lr_schedule_step(std::span<const double>{}, 1.0), ConfigError);
}

TEST(Checkpoint, RoundTripIsBitIdentical) {
  model::Model m(tiny_config(9, 5));
  support::randomize(m, 31);
  auto ckpt = train::capture(m);
  ckpt.epoch = 3;
  ckpt.learning_rate = 0.1;
  ckpt.dev_perplexity = 1.0 / 3.0;
  ckpt.seed = 99;
  ckpt.rng_state = train::serialize_rng(std::mt19937_64(4));
  ckpt.perplexity_history = {12.5, std::nextafter(7.0, 8.0), 1e-300};
  ckpt.best_epoch = 2;
  ckpt.best_perplexity = ckpt.perplexity_history[1];
  ckpt.vocab_hash = 0xfedcba9876543210ULL;
  std::stringstream buf;
  train::save_checkpoint(buf, ckpt);
  const std::string text = buf.str();
  const auto back = train::load_checkpoint(buf);
  EXPECT_EQ(back, ckpt);
  std::stringstream again;
  train::save_checkpoint(again, back);
  EXPECT_EQ(again.str(), text);
}

TEST(Checkpoint, ReloadedModelScoresIdentically) {
  model::Model m(tiny_config(9, 5));
  support::randomize(m, 37);
  std::stringstream buf;
  train::save_checkpoint(buf, train::capture(m));
  const auto ckpt = train::load_checkpoint(buf);
  model::Model copy(ckpt.model);
  train::restore_parameters(copy, ckpt);
  const std::vector<int> src{2, 5, 3, model::kEosId}, tgt{4, 4, model::kEosId};
  EXPECT_EQ(decode::score_sequence(m, src, tgt), decode::score_sequence(copy, src, tgt));
}

TEST(Checkpoint, RestoreChecksSlots) {
  model::Model joint(tiny_config(9, 5));
  model::Model plain(tiny_config(9, 5, 2, false));
  model::Model wider(tiny_config(9, 6));
  const auto ckpt = train::capture(joint);
  EXPECT_THROW(train::restore_parameters(plain, ckpt), ConfigError);
  EXPECT_NO_THROW(train::restore_parameters(plain, ckpt, true));
  EXPECT_THROW(train::restore_parameters(joint, train::capture(plain)), ConfigError);
  EXPECT_THROW(train::restore_parameters(wider, ckpt), DimensionError);
}

TEST(Checkpoint, CorruptInputRejected) {
  std::istringstream bad("not-a-checkpoint 1\n");
  EXPECT_ANY_THROW(train::load_checkpoint(bad));
  model::Model m(tiny_config(5, 2));
  std::stringstream buf;
  train::save_checkpoint(buf, train::capture(m));
  std::string text = buf.str();
  std::istringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_ANY_THROW(train::load_checkpoint(truncated));
}

TEST(HexDouble, ExactRoundTrip) {
  for (double v : {0.0, -0.0, 1.0 / 3.0, 1e-310, 6.02214076e23, -2.5}) {
    const double back = train::parse_hex_double(train::hex_double(v));
    EXPECT_EQ(std::signbit(back), std::signbit(v));
    EXPECT_EQ(back, v);
  }
}

TEST(Ablation, EachFlagRemovesOneHiddenBlock) {
  auto base = tiny_config(9, 5);
  base.hidden_dim = 7;
  const std::size_t full = model::Model(base).parameters().scalar_count();
  const std::size_t d = base.hidden_dim;
  for (const char* flag : {"without_buffer", "without-action", "without_stack"}) {
    auto c = base;
    model::set_ablation_flag(c.ablation, flag);
    EXPECT_EQ(model::Model(c).parameters().scalar_count(), full - d * d) << flag;
  }
  auto two = base;
  model::set_ablation_flag(two.ablation, "without_buffer");
  model::set_ablation_flag(two.ablation, "without_stack");
  EXPECT_EQ(model::Model(two).parameters().scalar_count(), full - 2 * d * d);
}

TEST(Ablation, UnknownFlagIsConfigError) {
  model::Ablation a;
  EXPECT_THROW(model::set_ablation_flag(a, "without_everything"), ConfigError);
}

TEST(TrainConfig, Validation) {
  train::TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.clip_threshold = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RngState, SerializeRoundTrip) {
  std::mt19937_64 rng(8);
  rng.discard(17);
  auto copy = train::deserialize_rng(train::serialize_rng(rng));
  EXPECT_EQ(copy(), rng());
}
