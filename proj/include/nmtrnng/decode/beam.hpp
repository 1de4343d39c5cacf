#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nmtrnng/model/model.hpp"

namespace nmtrnng::decode {

struct BeamOptions {
  std::size_t width = 5;
  // 0 selects 2 * (source length) + 10, EOS included.
  std::size_t max_length = 0;
  // Rank finished hypotheses by log-probability per token.
  bool length_normalize = false;
};

struct Translation {
  std::vector<int> ids;  // ends in EOS when finished
  double log_prob = 0.0;
  bool finished = false;
};

std::size_t default_max_length(std::size_t source_length);

// Length-bounded beam search over the translator alone; the parser slots
// are never read. Candidates are ranked by score, then by the rank of their
// parent hypothesis, then by token id, so equal scores resolve toward lower
// ids. Without length normalization the search stops as soon as no live
// hypothesis can beat the best finished one, which keeps it exact for
// widths covering the whole search space. When nothing finishes within the
// length bound the best unfinished hypothesis is returned with
// `finished = false`.
Translation translate_beam(const model::Model& model, std::span<const int> source,
                           const BeamOptions& options = {});

}  // namespace nmtrnng::decode
