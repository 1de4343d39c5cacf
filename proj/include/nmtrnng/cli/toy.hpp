#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nmtrnng/data/corpus.hpp"
#include "nmtrnng/model/model.hpp"

namespace nmtrnng::cli {

struct ToyData {
  std::vector<data::SentencePair> pairs;
  std::size_t source_vocab = 0;
  std::size_t target_vocab = 0;
  std::size_t num_labels = 0;
};

// `count` pairs with pairwise distinct sources. Each side has 1..max_length
// words (EOS excluded) drawn from the non-reserved ids; every target gets a
// random projective tree rooted at EOS.
ToyData make_toy_data(std::size_t count, std::size_t max_length, std::size_t source_vocab,
                      std::size_t target_vocab, std::size_t num_labels, std::uint64_t seed);

model::ModelConfig toy_model_config(const ToyData& data, std::size_t dim, bool with_rnng = true);

}  // namespace nmtrnng::cli
