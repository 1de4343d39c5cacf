#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "nmtrnng/data/vocabulary.hpp"

namespace nmtrnng::eval {

using data::Sentence;

enum class Metric { kBleu, kRibes };

inline constexpr std::size_t kMinResamples = 1000;
// Threshold used when marking a comparison significant.
inline constexpr double kSignificanceLevel = 0.005;

struct BootstrapResult {
  double p_value = 1.0;
  double score_a = 0.0;  // metric on the full test set
  double score_b = 0.0;
  std::size_t resamples = 0;
  std::size_t b_not_better = 0;

  bool significant() const { return p_value < kSignificanceLevel; }
};

// Paired bootstrap: draw `resamples` test sets of the same size with
// replacement, score both systems on the same draw, and report the fraction
// of draws where B does not outperform A.
BootstrapResult bootstrap_significance(std::span<const Sentence> system_a,
                                       std::span<const Sentence> system_b,
                                       std::span<const Sentence> references, Metric metric,
                                       std::size_t resamples = kMinResamples,
                                       std::uint64_t seed = 1);

}  // namespace nmtrnng::eval
