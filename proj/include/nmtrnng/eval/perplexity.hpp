#pragma once

#include <cstddef>
#include <span>

#include "nmtrnng/data/corpus.hpp"
#include "nmtrnng/model/model.hpp"

namespace nmtrnng::eval {

enum class PerplexityMode { kWords, kActions, kJoint };

struct PerplexityReport {
  double word_nll = 0.0;
  double action_nll = 0.0;
  std::size_t word_count = 0;
  std::size_t action_count = 0;

  double words() const;
  double actions() const;
  // Over #words + #actions symbols.
  double joint() const;
  double get(PerplexityMode mode) const;
};

// Teacher-forced NLL over `pairs`. Action terms are scored only when the
// model has a parser and the pair carries gold actions.
PerplexityReport perplexity(const model::Model& model, std::span<const data::SentencePair> pairs);

double perplexity(const model::Model& model, std::span<const data::SentencePair> pairs,
                  PerplexityMode mode);

}  // namespace nmtrnng::eval
