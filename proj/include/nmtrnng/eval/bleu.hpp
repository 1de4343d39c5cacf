#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "nmtrnng/data/vocabulary.hpp"

namespace nmtrnng::eval {

using data::Sentence;

inline constexpr std::size_t kBleuOrder = 4;

// Sufficient statistics of corpus BLEU; additive over sentences.
struct BleuStats {
  std::array<std::size_t, kBleuOrder> matches{};  // clipped n-gram matches
  std::array<std::size_t, kBleuOrder> totals{};   // hypothesis n-grams
  std::size_t hypothesis_length = 0;
  std::size_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& other);
  double precision(std::size_t order) const;  // order in 1..4
  double brevity_penalty() const;
};

struct BleuOptions {
  // Add-one smoothing of the 2..4-gram precisions, for sentence-level use.
  bool smooth = false;
};

BleuStats bleu_stats(const Sentence& hypothesis, const Sentence& reference);
// 0..100
double bleu_score(const BleuStats& stats, const BleuOptions& options = {});
double bleu(std::span<const Sentence> hypotheses, std::span<const Sentence> references,
            const BleuOptions& options = {});

}  // namespace nmtrnng::eval
