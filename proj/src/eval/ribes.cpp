#include "nmtrnng/eval/ribes.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::eval {

std::vector<int> ribes_alignment(const Sentence& hypothesis, const Sentence& reference) {
  std::unordered_map<std::string, std::vector<int>> ref_positions;
  std::unordered_map<std::string, int> hyp_count;
  for (std::size_t j = 0; j < reference.size(); ++j) {
    ref_positions[reference[j]].push_back(static_cast<int>(j));
  }
  for (const auto& w : hypothesis) ++hyp_count[w];

  std::vector<int> aligned(hypothesis.size(), -1);
  std::vector<bool> used(reference.size(), false);
  for (std::size_t i = 0; i < hypothesis.size(); ++i) {
    auto it = ref_positions.find(hypothesis[i]);
    if (it != ref_positions.end() && it->second.size() == 1 && hyp_count[hypothesis[i]] == 1) {
      aligned[i] = it->second.front();
      used[static_cast<std::size_t>(aligned[i])] = true;
    }
  }
  for (std::size_t i = 0; i < hypothesis.size(); ++i) {
    if (aligned[i] >= 0) continue;
    auto it = ref_positions.find(hypothesis[i]);
    if (it == ref_positions.end()) continue;
    for (int j : it->second) {
      if (!used[static_cast<std::size_t>(j)]) {
        aligned[i] = j;
        used[static_cast<std::size_t>(j)] = true;
        break;
      }
    }
  }
  std::vector<int> ranks;
  for (int j : aligned) {
    if (j >= 0) ranks.push_back(j);
  }
  return ranks;
}

RibesComponents ribes_sentence(const Sentence& hypothesis, const Sentence& reference,
                               const RibesOptions& options) {
  RibesComponents c;
  if (reference.empty()) throw Error("RIBES: reference has no words");
  if (hypothesis.empty()) return c;
  c.brevity_penalty =
      std::min(1.0, std::exp(1.0 - static_cast<double>(reference.size()) /
                                       static_cast<double>(hypothesis.size())));
  const std::vector<int> ranks = ribes_alignment(hypothesis, reference);
  const std::size_t n = ranks.size();
  if (n == 1 && reference.size() == 1) {
    c.normalized_kendall = 1.0;
  } else if (n >= 2) {
    std::size_t ascending = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) ascending += ranks[i] < ranks[j];
    }
    c.normalized_kendall =
        static_cast<double>(ascending) / (static_cast<double>(n * (n - 1)) / 2.0);
  }
  c.precision = static_cast<double>(n) / static_cast<double>(hypothesis.size());
  c.score = c.normalized_kendall * std::pow(c.precision, options.alpha) *
            std::pow(c.brevity_penalty, options.beta);
  return c;
}

double ribes(std::span<const Sentence> hypotheses, std::span<const Sentence> references,
             const RibesOptions& options) {
  if (hypotheses.size() != references.size()) {
    throw Error("RIBES: " + std::to_string(hypotheses.size()) + " hypotheses for " +
                std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) return 0.0;
  std::vector<double> scores;
  scores.reserve(hypotheses.size());
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    scores.push_back(ribes_sentence(hypotheses[i], references[i], options).score);
  }
  // Summing in sorted order makes the mean independent of line order.
  std::sort(scores.begin(), scores.end());
  double total = 0.0;
  for (double s : scores) total += s;
  return 100.0 * total / static_cast<double>(hypotheses.size());
}

}  // namespace nmtrnng::eval
