#include "nmtrnng/eval/perplexity.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nmtrnng/rnng/joint.hpp"

namespace nmtrnng::eval {

namespace {

double exp_mean(double nll, std::size_t count) {
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  return std::exp(nll / static_cast<double>(count));
}

}  // namespace

double PerplexityReport::words() const { return exp_mean(word_nll, word_count); }
double PerplexityReport::actions() const { return exp_mean(action_nll, action_count); }
double PerplexityReport::joint() const {
  return exp_mean(word_nll + action_nll, word_count + action_count);
}

double PerplexityReport::get(PerplexityMode mode) const {
  switch (mode) {
    case PerplexityMode::kWords: return words();
    case PerplexityMode::kActions: return actions();
    case PerplexityMode::kJoint: return joint();
  }
  return joint();
}

PerplexityReport perplexity(const model::Model& model, std::span<const data::SentencePair> pairs) {
  PerplexityReport report;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    core::Graph g(model.parameters());
    if (model.has_parser() && !pair.actions.empty()) {
      rnng::JointLossOptions options;
      options.sentence = std::to_string(i + 1);
      const rnng::JointLoss loss =
          rnng::joint_nll(g, model, pair.source, pair.target, pair.actions, options);
      report.word_nll += loss.words.value()[0];
      report.action_nll += loss.actions.value()[0];
      report.word_count += loss.word_count;
      report.action_count += loss.action_count;
    } else {
      report.word_nll += rnng::translation_nll(g, model, pair.source, pair.target).value()[0];
      report.word_count += pair.target.size();
    }
  }
  return report;
}

double perplexity(const model::Model& model, std::span<const data::SentencePair> pairs,
                  PerplexityMode mode) {
  return perplexity(model, pairs).get(mode);
}

}  // namespace nmtrnng::eval
