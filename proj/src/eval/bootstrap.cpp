#include "nmtrnng/eval/bootstrap.hpp"

#include <random>
#include <string>
#include <vector>

#include "nmtrnng/core/errors.hpp"
#include "nmtrnng/eval/bleu.hpp"
#include "nmtrnng/eval/ribes.hpp"

namespace nmtrnng::eval {

BootstrapResult bootstrap_significance(std::span<const Sentence> system_a,
                                       std::span<const Sentence> system_b,
                                       std::span<const Sentence> references, Metric metric,
                                       std::size_t resamples, std::uint64_t seed) {
  const std::size_t n = references.size();
  if (system_a.size() != n || system_b.size() != n) {
    throw Error("bootstrap: systems and references must be line-aligned");
  }
  if (n == 0) throw Error("bootstrap: empty test set");
  if (resamples < kMinResamples) {
    throw ConfigError("bootstrap needs at least " + std::to_string(kMinResamples) +
                      " resamples");
  }

  std::vector<BleuStats> bleu_a, bleu_b;
  std::vector<double> ribes_a, ribes_b;
  if (metric == Metric::kBleu) {
    for (std::size_t i = 0; i < n; ++i) {
      bleu_a.push_back(bleu_stats(system_a[i], references[i]));
      bleu_b.push_back(bleu_stats(system_b[i], references[i]));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      ribes_a.push_back(ribes_sentence(system_a[i], references[i]).score);
      ribes_b.push_back(ribes_sentence(system_b[i], references[i]).score);
    }
  }

  auto score = [&](const std::vector<std::size_t>& sample, bool second) {
    if (metric == Metric::kBleu) {
      BleuStats total;
      for (auto i : sample) total += second ? bleu_b[i] : bleu_a[i];
      return bleu_score(total);
    }
    double total = 0.0;
    for (auto i : sample) total += second ? ribes_b[i] : ribes_a[i];
    return 100.0 * total / static_cast<double>(sample.size());
  };

  BootstrapResult result;
  result.resamples = resamples;
  result.score_a = metric == Metric::kBleu ? bleu(system_a, references) : ribes(system_a, references);
  result.score_b = metric == Metric::kBleu ? bleu(system_b, references) : ribes(system_b, references);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> draw(0, n - 1);
  std::vector<std::size_t> sample(n);
  for (std::size_t r = 0; r < resamples; ++r) {
    for (auto& i : sample) i = draw(rng);
    if (!(score(sample, true) > score(sample, false))) ++result.b_not_better;
  }
  result.p_value = static_cast<double>(result.b_not_better) / static_cast<double>(resamples);
  return result;
}

}  // namespace nmtrnng::eval
