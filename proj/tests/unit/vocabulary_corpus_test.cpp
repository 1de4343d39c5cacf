#include <sstream>

#include <gtest/gtest.h>

#include "nmtrnng/core/errors.hpp"
#include "nmtrnng/data/corpus.hpp"
#include "nmtrnng/data/vocabulary.hpp"

using namespace nmtrnng;
using data::Sentence;
using data::Vocabulary;

namespace {

const std::vector<Sentence> kCorpus{{"a", "b", "a"}, {"c", "a", "b"}, {"d"}};

}  // namespace

TEST(Vocabulary, CutoffOneKeepsEveryToken) {
  const auto v = Vocabulary::build(kCorpus, 1);
  EXPECT_EQ(v.size(), 6u);
  for (const auto& s : kCorpus) {
    for (const auto& t : s) EXPECT_NE(v.id(t), model::kUnkId) << t;
  }
}

TEST(Vocabulary, ReservedIdsAndFrequencyOrder) {
  const auto v = Vocabulary::build(kCorpus, 1);
  EXPECT_EQ(v.token(model::kUnkId), "UNK");
  EXPECT_EQ(v.token(model::kEosId), "EOS");
  EXPECT_EQ(v.id("a"), 2);
  EXPECT_EQ(v.id("b"), 3);
  EXPECT_EQ(v.id("c"), 4);  // ties lexicographic
  EXPECT_EQ(v.id("d"), 5);
  EXPECT_EQ(v.count(2), 3u);
}

TEST(Vocabulary, RareTokensMapToUnk) {
  const auto v = Vocabulary::build(kCorpus, 2);
  EXPECT_EQ(v.size(), 4u);
  EXPECT_EQ(v.id("d"), model::kUnkId);
  EXPECT_EQ(v.id("never-seen"), model::kUnkId);
  EXPECT_EQ(v.encode({"d", "a"}), (std::vector<int>{model::kUnkId, 2, model::kEosId}));
}

TEST(Vocabulary, EmptyCorpusIsAnError) {
  EXPECT_THROW(Vocabulary::build({}, 1), VocabularyError);
}

TEST(Vocabulary, EncodeDecodeIdentity) {
  const auto v = Vocabulary::build(kCorpus, 1);
  for (int id = 0; id < static_cast<int>(v.size()); ++id) {
    if (id == model::kEosId) continue;
    const auto decoded = v.decode(std::vector<int>{id});
    ASSERT_EQ(decoded.size(), 1u);
    EXPECT_EQ(v.id(decoded[0]), id);
  }
  EXPECT_EQ(v.decode(v.encode({"c", "a"})), (Sentence{"c", "a"}));
  EXPECT_THROW(v.token(99), VocabularyError);
}

TEST(Vocabulary, SaveLoadRoundTrip) {
  const auto v = Vocabulary::build(kCorpus, 1);
  std::stringstream buf;
  v.save(buf);
  EXPECT_EQ(buf.str().substr(0, 4), "a\t3\n");
  const auto w = Vocabulary::load(buf);
  ASSERT_EQ(w.size(), v.size());
  for (int id = 0; id < static_cast<int>(v.size()); ++id) EXPECT_EQ(w.token(id), v.token(id));
}

TEST(LabelSet, BuildFindSaveLoad) {
  const auto labels = data::LabelSet::build({{"obj", 2}, {"nsubj", 5}, {"amod", 2}});
  EXPECT_EQ(labels.size(), 3u);
  EXPECT_EQ(labels.name(0), "nsubj");
  EXPECT_EQ(labels.name(1), "amod");
  EXPECT_EQ(labels.find("missing"), -1);
  EXPECT_THROW(labels.id("missing"), VocabularyError);
  std::stringstream buf;
  labels.save(buf);
  const auto back = data::LabelSet::load(buf);
  EXPECT_EQ(back.id("obj"), labels.id("obj"));
}

TEST(ContentHash, StableAndSensitive) {
  // FNV-1a 64 reference values
  EXPECT_EQ(data::content_hash(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(data::content_hash("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_NE(data::content_hash("a\t3\n"), data::content_hash("a\t4\n"));
}

TEST(FilterCorpus, LengthAndEmptinessRules) {
  std::vector<data::RawPair> pairs(4);
  pairs[0].source = Sentence(51, "x");
  pairs[0].target = {"y"};
  pairs[1].source = {"x"};
  pairs[1].target = {};
  pairs[2].source = Sentence(50, "x");
  pairs[2].target = Sentence(50, "y");
  pairs[3].source = {"x"};
  pairs[3].target = Sentence(51, "y");
  const auto r = data::filter_corpus(pairs);
  EXPECT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].source.size(), 50u);
  EXPECT_EQ(r.dropped_length, 2u);
  EXPECT_EQ(r.dropped_empty, 1u);
}

TEST(FilterCorpus, AllValidUnchanged) {
  std::vector<data::RawPair> pairs(3);
  for (std::size_t i = 0; i < 3; ++i) {
    pairs[i].source = Sentence(i + 1, "s");
    pairs[i].target = Sentence(i + 2, "t");
    pairs[i].line = i + 1;
  }
  const auto r = data::filter_corpus(pairs);
  ASSERT_EQ(r.kept.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.kept[i].line, i + 1);
}

TEST(AlignCorpus, ParsesFollowNonEmptyTargets) {
  std::istringstream conll("1\tx\t0\troot\n\n1\ty\t2\ta\n2\tz\t0\troot\n");
  const auto parses = data::read_conll(conll);
  const auto pairs = data::align_corpus({{"s1"}, {"s2"}, {"s3"}}, {{"x"}, {}, {"y", "z"}}, &parses);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_TRUE(pairs[0].parse.has_value());
  EXPECT_FALSE(pairs[1].parse.has_value());
  EXPECT_EQ(pairs[2].parse->forms[1], "z");
}

TEST(AlignCorpus, MismatchNamesLine) {
  std::istringstream conll("1\tx\t0\troot\n\n1\tq\t0\troot\n");
  const auto parses = data::read_conll(conll);
  try {
    data::align_corpus({{"s1"}, {"s2"}}, {{"x"}, {"y"}}, &parses);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("target line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(data::align_corpus({{"s1"}}, {{"x"}, {"y"}}, nullptr), ParseError);
}

TEST(IdAndActionFiles, RoundTrip) {
  const std::vector<std::vector<int>> ids{{2, 3, 1}, {1}};
  std::stringstream buf;
  data::write_id_lines(buf, ids);
  EXPECT_EQ(data::read_id_lines(buf), ids);

  const auto labels = data::LabelSet::build({{"a", 1}});
  const rnng::ActionSequence seq{rnng::Action::shift(), rnng::Action::shift(),
                                 rnng::Action::reduce_left(0)};
  std::stringstream abuf;
  data::write_action_line(abuf, seq, labels);
  EXPECT_EQ(abuf.str(), "SHIFT SHIFT REDUCE-L(a)\n");
  EXPECT_EQ(data::read_action_lines(abuf, labels), std::vector<rnng::ActionSequence>{seq});
}
