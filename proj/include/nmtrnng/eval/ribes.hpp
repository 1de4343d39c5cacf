#pragma once

#include <span>
#include <vector>

#include "nmtrnng/data/vocabulary.hpp"

namespace nmtrnng::eval {

using data::Sentence;

struct RibesOptions {
  double alpha = 0.25;  // exponent of unigram precision
  double beta = 0.10;   // exponent of brevity penalty
};

struct RibesComponents {
  double normalized_kendall = 0.0;  // (tau + 1) / 2
  double precision = 0.0;
  double brevity_penalty = 0.0;
  double score = 0.0;               // 0..1
};

// Rank of the aligned reference position of every hypothesis word that has
// one. Words occurring exactly once on both sides align first; remaining
// words take the leftmost unused reference position with the same form.
std::vector<int> ribes_alignment(const Sentence& hypothesis, const Sentence& reference);

RibesComponents ribes_sentence(const Sentence& hypothesis, const Sentence& reference,
                               const RibesOptions& options = {});

// Mean sentence score scaled to 0..100.
double ribes(std::span<const Sentence> hypotheses, std::span<const Sentence> references,
             const RibesOptions& options = {});

}  // namespace nmtrnng::eval
