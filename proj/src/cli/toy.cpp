#include "nmtrnng/cli/toy.hpp"

#include <random>
#include <set>

#include "nmtrnng/core/errors.hpp"
#include "nmtrnng/data/dep_tree.hpp"

namespace nmtrnng::cli {

namespace {

std::vector<int> random_sentence(std::mt19937_64& rng, std::size_t max_length, std::size_t vocab) {
  std::uniform_int_distribution<std::size_t> len(1, max_length);
  std::uniform_int_distribution<int> word(2, static_cast<int>(vocab) - 1);
  std::vector<int> ids(len(rng));
  for (int& w : ids) w = word(rng);
  ids.push_back(model::kEosId);
  return ids;
}

}  // namespace

ToyData make_toy_data(std::size_t count, std::size_t max_length, std::size_t source_vocab,
                      std::size_t target_vocab, std::size_t num_labels, std::uint64_t seed) {
  if (source_vocab < 3 || target_vocab < 3 || max_length == 0 || num_labels == 0) {
    throw ConfigError("toy data needs vocabularies of at least 3, a length and a label");
  }
  ToyData data{{}, source_vocab, target_vocab, num_labels};
  std::mt19937_64 rng(seed);
  std::set<std::vector<int>> sources;
  std::size_t attempts = 0;
  while (data.pairs.size() < count) {
    if (++attempts > 1000 * (count + 1)) throw ConfigError("toy data: too few distinct sources");
    auto source = random_sentence(rng, max_length, source_vocab);
    if (!sources.insert(source).second) continue;
    auto target = random_sentence(rng, max_length, target_vocab);
    const auto tree = data::random_projective_tree(target.size(), num_labels, rng);
    data.pairs.push_back(
        data::SentencePair{std::move(source), std::move(target), data::tree_to_actions(tree)});
  }
  return data;
}

model::ModelConfig toy_model_config(const ToyData& data, std::size_t dim, bool with_rnng) {
  model::ModelConfig c;
  c.source_vocab = data.source_vocab;
  c.target_vocab = data.target_vocab;
  c.num_labels = data.num_labels;
  c.word_dim = dim;
  c.action_dim = dim;
  c.hidden_dim = dim;
  c.with_rnng = with_rnng;
  return c;
}

}  // namespace nmtrnng::cli
