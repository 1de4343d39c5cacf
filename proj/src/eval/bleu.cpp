#include "nmtrnng/eval/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::eval {

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts count_ngrams(const Sentence& s, std::size_t n) {
  NgramCounts counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) {
    ++counts[std::vector<std::string>(s.begin() + static_cast<std::ptrdiff_t>(i),
                                      s.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hypothesis_length += other.hypothesis_length;
  reference_length += other.reference_length;
  return *this;
}

double BleuStats::precision(std::size_t order) const {
  const std::size_t n = order - 1;
  return totals[n] == 0 ? 0.0
                        : static_cast<double>(matches[n]) / static_cast<double>(totals[n]);
}

double BleuStats::brevity_penalty() const {
  if (hypothesis_length == 0) return 0.0;
  if (hypothesis_length >= reference_length) return 1.0;
  return std::exp(1.0 - static_cast<double>(reference_length) /
                            static_cast<double>(hypothesis_length));
}

BleuStats bleu_stats(const Sentence& hypothesis, const Sentence& reference) {
  BleuStats stats;
  stats.hypothesis_length = hypothesis.size();
  stats.reference_length = reference.size();
  for (std::size_t n = 1; n <= kBleuOrder; ++n) {
    const NgramCounts hyp = count_ngrams(hypothesis, n);
    const NgramCounts ref = count_ngrams(reference, n);
    for (const auto& [gram, count] : hyp) {
      stats.totals[n - 1] += count;
      auto it = ref.find(gram);
      if (it != ref.end()) stats.matches[n - 1] += std::min(count, it->second);
    }
  }
  return stats;
}

double bleu_score(const BleuStats& stats, const BleuOptions& options) {
  double log_sum = 0.0;
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    double m = static_cast<double>(stats.matches[n]);
    double t = static_cast<double>(stats.totals[n]);
    if (options.smooth && n > 0) {
      m += 1.0;
      t += 1.0;
    }
    if (m == 0.0 || t == 0.0) return 0.0;
    log_sum += std::log(m / t);
  }
  return 100.0 * stats.brevity_penalty() * std::exp(log_sum / kBleuOrder);
}

double bleu(std::span<const Sentence> hypotheses, std::span<const Sentence> references,
            const BleuOptions& options) {
  if (hypotheses.size() != references.size()) {
    throw Error("BLEU: " + std::to_string(hypotheses.size()) + " hypotheses for " +
                std::to_string(references.size()) + " references");
  }
  BleuStats total;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    total += bleu_stats(hypotheses[i], references[i]);
  }
  return bleu_score(total, options);
}

}  // namespace nmtrnng::eval
