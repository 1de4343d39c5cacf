#include <numeric>

#include <gtest/gtest.h>

#include "nmtrnng/core/errors.hpp"
#include "nmtrnng/core/grad_check.hpp"
#include "nmtrnng/core/ops.hpp"
#include "nmtrnng/data/dep_tree.hpp"
#include "nmtrnng/rnng/joint.hpp"
#include "test_support.hpp"

using namespace nmtrnng;
using core::Graph;
using core::Tensor;
using rnng::Action;

namespace {

struct JointFixture : ::testing::Test {
  JointFixture() : model(support::tiny_config(8, 4, 2)) { support::randomize(model, 5); }
  model::Model model;
  const std::vector<int> source{3, 4, 5, model::kEosId};
};

// w0 <- w1, w1 <- EOS
const std::vector<int> kTarget{2, 6, model::kEosId};
const rnng::ActionSequence kActions{Action::shift(), Action::shift(), Action::reduce_left(1),
                                     Action::shift(), Action::reduce_left(0)};

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_F(JointFixture, InitialStateOnlyShifts) {
  Graph g(std::as_const(model).parameters());
  auto state = rnng::initial_joint_state(g, model, std::nullopt);
  const auto p = rnng::action_distribution(g, model, state);
  EXPECT_EQ(p[0], 1.0);
  for (std::size_t i = 1; i < p.size(); ++i) EXPECT_EQ(p[i], 0.0);
}

TEST_F(JointFixture, ZeroActionOutputIsUniformOverLegal) {
  model.parameters()[model.parser().action_output_weight].value.fill(0.0);
  model.parameters()[model.parser().action_output_bias].value.fill(0.0);
  Graph g(std::as_const(model).parameters());
  auto enc = model::encode(g, model, source);
  auto state = rnng::initial_joint_state(g, model, 3);
  rnng::apply_shift(g, model, enc, state, 2);
  rnng::apply_shift(g, model, enc, state, 6);
  for (double v : rnng::action_distribution(g, model, state)) EXPECT_NEAR(v, 0.2, 1e-15);
  rnng::apply_shift(g, model, enc, state, model::kEosId);
  // only REDUCE-L(0), REDUCE-L(1) remain
  const auto p = rnng::action_distribution(g, model, state);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
  EXPECT_NEAR(p[3], 0.5, 1e-15);
}

TEST_F(JointFixture, RandomRolloutsGiveProperDistributions) {
  std::mt19937_64 rng(12);
  for (int rollout = 0; rollout < 20; ++rollout) {
    Graph g(std::as_const(model).parameters());
    auto enc = model::encode(g, model, source);
    auto state = rnng::initial_joint_state(g, model, std::nullopt);
    while (!state.parser.system.terminal()) {
      const auto scores = rnng::action_scores(g, model, state);
      const auto p = scores.probabilities();
      EXPECT_NEAR(sum(p), 1.0, 1e-12);
      std::vector<std::size_t> legal;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (scores.legal[i]) legal.push_back(i);
      }
      ASSERT_FALSE(legal.empty());
      const auto a = rnng::action_from_id(legal[rng() % legal.size()], 2);
      if (a.is_shift()) {
        const int word = (rng() % 4 == 0 || state.words.size() > 6) ? model::kEosId
                                                                     : 2 + static_cast<int>(rng() % 6);
        rnng::apply_shift(g, model, enc, state, word);
      } else {
        rnng::apply_reduce(g, model, state, a);
      }
      EXPECT_EQ(state.decoder_steps, state.shifts);
    }
    EXPECT_EQ(state.parser.system.arcs().size() + 1, state.words.size());
  }
}

TEST_F(JointFixture, ShiftStepsDecoderAndPushesSharedEmbedding) {
  Graph g(std::as_const(model).parameters());
  auto enc = model::encode(g, model, source);
  auto state = rnng::initial_joint_state(g, model, std::nullopt);
  ASSERT_EQ(model.parser().stack_embedding, model.translator().target_embedding);
  for (int word : {5, 2}) {
    const auto steps = state.decoder_steps;
    const auto depth = state.parser.stack.depth();
    rnng::apply_shift(g, model, enc, state, word);
    EXPECT_EQ(state.decoder_steps, steps + 1);
    EXPECT_EQ(state.parser.stack.depth(), depth + 1);
    const auto& table = model.parameters()[model.translator().target_embedding].value;
    const auto pushed = state.parser.items.back().composed.value();
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_EQ(pushed[k], table.at(static_cast<std::size_t>(word), k));
    }
  }
}

TEST_F(JointFixture, ReduceComposesAndRecordsArc) {
  Graph g(std::as_const(model).parameters());
  auto enc = model::encode(g, model, source);
  auto state = rnng::initial_joint_state(g, model, 3);
  EXPECT_THROW(rnng::apply_reduce(g, model, state, Action::reduce_left(0)), TransitionError);
  rnng::apply_shift(g, model, enc, state, 2);
  rnng::apply_shift(g, model, enc, state, 6);
  rnng::apply_reduce(g, model, state, Action::reduce_right(1));
  EXPECT_EQ(state.parser.stack.depth(), 1u);
  EXPECT_EQ(state.parser.items.size(), 1u);
  EXPECT_EQ(state.parser.items.back().token, 0);
  EXPECT_EQ(state.parser.system.arcs().back(), (rnng::Arc{1, 0, 1}));
  for (double v : state.parser.items.back().composed.value().values()) {
    EXPECT_GT(v, -1.0);
    EXPECT_LT(v, 1.0);
  }
  rnng::apply_shift(g, model, enc, state, model::kEosId);
  EXPECT_THROW(rnng::apply_shift(g, model, enc, state, 2), TransitionError);
}

TEST_F(JointFixture, CompositionUsesDependentHeadActionOrder) {
  Graph g(std::as_const(model).parameters());
  auto enc = model::encode(g, model, source);
  auto state = rnng::initial_joint_state(g, model, 3);
  rnng::apply_shift(g, model, enc, state, 2);
  rnng::apply_shift(g, model, enc, state, 6);
  const auto& store = model.parameters();
  const auto& p = model.parser();
  rnng::apply_reduce(g, model, state, Action::reduce_left(1));
  const Tensor& wr = store[p.composition].value;
  const Tensor& emb = store[p.stack_embedding].value;
  const Tensor& act = store[p.action_embedding].value;
  const std::size_t id = rnng::action_id(Action::reduce_left(1), 2);
  std::vector<double> input;
  for (std::size_t k = 0; k < 4; ++k) input.push_back(emb.at(2, k));   // dependent w0
  for (std::size_t k = 0; k < 4; ++k) input.push_back(emb.at(6, k));   // head w1
  for (std::size_t k = 0; k < 4; ++k) input.push_back(act.at(id, k));
  const auto r = state.parser.items.back().composed.value();
  for (std::size_t row = 0; row < 4; ++row) {
    double z = 0.0;
    for (std::size_t c = 0; c < input.size(); ++c) z += wr.at(row, c) * input[c];
    EXPECT_NEAR(r[row], std::tanh(z), 1e-15);
  }
}

TEST_F(JointFixture, PerfectModelHasZeroLoss) {
  model.parameters()[model.translator().output_bias].value[model::kEosId] = 1000.0;
  Graph g(std::as_const(model).parameters());
  const std::vector<int> target{model::kEosId};
  const rnng::ActionSequence actions{Action::shift()};
  const auto loss = rnng::joint_nll(g, model, source, target, actions);
  EXPECT_NEAR(loss.total.value()[0], 0.0, 1e-12);
}

TEST_F(JointFixture, LossFinitePositiveAndCounted) {
  Graph g(std::as_const(model).parameters());
  const auto loss = rnng::joint_nll(g, model, source, kTarget, kActions);
  EXPECT_GT(loss.total.value()[0], 0.0);
  EXPECT_TRUE(loss.total.value().all_finite());
  EXPECT_EQ(loss.word_count, 3u);
  EXPECT_EQ(loss.action_count, 5u);
  EXPECT_NEAR(loss.total.value()[0], loss.words.value()[0] + loss.actions.value()[0], 1e-12);
}

TEST_F(JointFixture, JointLossPassesGradCheck) {
  const auto report = core::grad_check(model.parameters(), [&](Graph& g) {
    return rnng::joint_nll(g, model, source, kTarget, kActions).total;
  });
  EXPECT_LT(report.max_relative_error, 1e-4) << report.worst_slot;
}

TEST_F(JointFixture, SupervisionErrors) {
  Graph g(std::as_const(model).parameters());
  rnng::JointLossOptions options;
  options.sentence = "pair 17";
  const rnng::ActionSequence too_few{Action::shift(), Action::shift(), Action::reduce_left(0)};
  try {
    rnng::joint_nll(g, model, source, kTarget, too_few, options);
    FAIL();
  } catch (const SupervisionError& e) {
    EXPECT_NE(std::string(e.what()).find("pair 17"), std::string::npos);
  }
  const rnng::ActionSequence illegal{Action::shift(), Action::reduce_left(0), Action::shift(),
                                     Action::shift(), Action::reduce_left(0)};
  EXPECT_THROW(rnng::joint_nll(g, model, source, kTarget, illegal), TransitionError);
  const rnng::ActionSequence unfinished{Action::shift(), Action::shift(), Action::shift(),
                                        Action::reduce_left(0)};
  EXPECT_THROW(rnng::joint_nll(g, model, source, kTarget, unfinished), SupervisionError);
}

TEST_F(JointFixture, WordTermAloneEqualsTranslationLoss) {
  Graph g(std::as_const(model).parameters());
  rnng::JointLossOptions options;
  options.include_action_loss = false;
  const double joint = rnng::joint_nll(g, model, source, kTarget, kActions, options).total.value()[0];
  const double plain = rnng::translation_nll(g, model, source, kTarget).value()[0];
  EXPECT_NEAR(joint, plain, 1e-12);
}

TEST_F(JointFixture, ShiftCountTracksDecoderStepsAtEveryPrefix) {
  Graph g(std::as_const(model).parameters());
  std::size_t transitions = 0;
  rnng::JointLossOptions options;
  options.observer = [&](const rnng::JointState& s) {
    ++transitions;
    EXPECT_EQ(s.decoder_steps, s.shifts);
    EXPECT_EQ(s.words.size(), s.shifts);
  };
  rnng::joint_nll(g, model, source, kTarget, kActions, options);
  EXPECT_EQ(transitions, kActions.size());
}

TEST_F(JointFixture, SharedEmbeddingGradientIsDecoderPlusStackPaths) {
  auto untied_config = model.config();
  untied_config.tie_stack_embeddings = false;
  model::Model untied(untied_config);
  for (auto& p : untied.parameters()) {
    const auto id = model.parameters().find(p.name == "stack_embedding" ? "target_embedding" : p.name);
    ASSERT_TRUE(id.has_value()) << p.name;
    p.value = model.parameters()[*id].value;
  }
  {
    Graph g(model.parameters());
    g.backward(rnng::joint_nll(g, model, source, kTarget, kActions).total);
  }
  {
    Graph g(untied.parameters());
    g.backward(rnng::joint_nll(g, untied, source, kTarget, kActions).total);
  }
  const auto& tied = model.parameters()[model.translator().target_embedding].grad;
  const auto& decoder_path = untied.parameters()[untied.translator().target_embedding].grad;
  const auto& stack_path = untied.parameters()[untied.parser().stack_embedding].grad;
  double stack_norm = 0.0;
  for (std::size_t i = 0; i < tied.size(); ++i) {
    EXPECT_NEAR(tied[i], decoder_path[i] + stack_path[i], 1e-14);
    stack_norm += std::abs(stack_path[i]);
  }
  EXPECT_GT(stack_norm, 0.0);
  // Translation alone reaches the table only through the decoder input.
  model.parameters().zero_grad();
  Graph g(model.parameters());
  g.backward(rnng::translation_nll(g, model, source, kTarget));
  for (std::size_t row = 0; row < 8; ++row) {
    const bool fed = row == model::kEosId || row == 2 || row == 6;
    for (std::size_t k = 0; k < 4; ++k) {
      if (!fed) {
        EXPECT_EQ(tied.at(row, k), 0.0);
      }
    }
  }
}

namespace {

struct Perturbation {
  std::string flag;
  std::function<void(Graph&, rnng::JointState&, std::mt19937_64&)> apply;
};

std::vector<Perturbation> perturbations(const model::Model& m) {
  return {
      {"without_buffer",
       [](Graph& g, rnng::JointState& s, std::mt19937_64& rng) {
         s.decoder.recurrent.hidden = g.constant(support::random_tensor(rng, {4}));
       }},
      {"without_stack",
       [](Graph& g, rnng::JointState& s, std::mt19937_64& rng) {
         s.parser.stack.push(g, g.constant(support::random_tensor(rng, {4})));
       }},
      {"without_action",
       [&m](Graph& g, rnng::JointState& s, std::mt19937_64& rng) {
         (void)m;
         s.parser.history.push(g, g.constant(support::random_tensor(rng, {4})));
       }},
  };
}

}  // namespace

TEST_F(JointFixture, AblatedComponentsDoNotReachActionLogits) {
  for (const auto& p : perturbations(model)) {
    for (bool ablate : {true, false}) {
      auto config = model.config();
      if (ablate) model::set_ablation_flag(config.ablation, p.flag);
      model::Model m(config);
      support::randomize(m, 23);
      Graph g(std::as_const(m).parameters());
      auto enc = model::encode(g, m, source);
      auto state = rnng::initial_joint_state(g, m, 3);
      rnng::apply_shift(g, m, enc, state, 4);
      rnng::apply_shift(g, m, enc, state, 5);
      const Tensor before = rnng::action_scores(g, m, state).logits.value();
      std::mt19937_64 rng(3);
      p.apply(g, state, rng);
      const Tensor after = rnng::action_scores(g, m, state).logits.value();
      if (ablate) {
        EXPECT_EQ(before, after) << p.flag;
      } else {
        EXPECT_NE(before, after) << p.flag;
      }
    }
  }
}
