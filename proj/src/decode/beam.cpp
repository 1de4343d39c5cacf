#include "nmtrnng/decode/beam.hpp"

#include <algorithm>
#include <limits>
#include <utility>

#include "nmtrnng/core/errors.hpp"
#include "nmtrnng/core/graph.hpp"
#include "nmtrnng/core/ops.hpp"
#include "nmtrnng/model/translator.hpp"

namespace nmtrnng::decode {

namespace {

struct Hypothesis {
  std::vector<int> ids;
  double log_prob = 0.0;
  model::DecoderState state;
};

struct Candidate {
  double log_prob;
  std::size_t parent;
  int token;
};

double ranking_score(double log_prob, std::size_t length, bool normalize) {
  return normalize && length > 0 ? log_prob / static_cast<double>(length) : log_prob;
}

}  // namespace

std::size_t default_max_length(std::size_t source_length) { return 2 * source_length + 10; }

Translation translate_beam(const model::Model& model, std::span<const int> source,
                           const BeamOptions& options) {
  if (options.width == 0) throw ConfigError("beam width must be at least 1");
  const std::size_t max_length =
      options.max_length ? options.max_length : default_max_length(source.size());

  core::Graph g(std::as_const(model).parameters());
  const auto encoding = model::encode(g, model, source);
  std::vector<Hypothesis> beam{Hypothesis{{}, 0.0, model::initial_decoder_state(g, model)}};
  std::vector<Translation> finished;

  for (std::size_t length = 1; length <= max_length && !beam.empty(); ++length) {
    std::vector<Candidate> candidates;
    std::vector<model::DecoderState> next_states;
    for (std::size_t h = 0; h < beam.size(); ++h) {
      const auto& hyp = beam[h];
      const int prev = hyp.ids.empty() ? model::kEosId : hyp.ids.back();
      auto out = model::decoder_step(g, model, hyp.state, prev, encoding);
      const auto logp = core::log_softmax(out.logits.value().values());
      for (std::size_t w = 0; w < logp.size(); ++w) {
        candidates.push_back(Candidate{hyp.log_prob + logp[w], h, static_cast<int>(w)});
      }
      next_states.push_back(out.state);
    }
    const std::size_t keep = std::min(options.width, candidates.size());
    const auto better = [&](const Candidate& a, const Candidate& b) {
      const double sa = ranking_score(a.log_prob, length, options.length_normalize);
      const double sb = ranking_score(b.log_prob, length, options.length_normalize);
      if (sa != sb) return sa > sb;
      if (a.parent != b.parent) return a.parent < b.parent;
      return a.token < b.token;
    };
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<long>(keep),
                      candidates.end(), better);

    std::vector<Hypothesis> next;
    for (std::size_t i = 0; i < keep; ++i) {
      const auto& c = candidates[i];
      std::vector<int> ids = beam[c.parent].ids;
      ids.push_back(c.token);
      if (c.token == model::kEosId) {
        finished.push_back(Translation{std::move(ids), c.log_prob, true});
      } else {
        next.push_back(Hypothesis{std::move(ids), c.log_prob, next_states[c.parent]});
      }
    }
    beam = std::move(next);

    if (!options.length_normalize && !finished.empty() && !beam.empty()) {
      double best_finished = -std::numeric_limits<double>::infinity();
      for (const auto& f : finished) best_finished = std::max(best_finished, f.log_prob);
      // beam is sorted, so its front is the best live score; log-probs only fall.
      if (best_finished >= beam.front().log_prob) break;
    }
  }

  const auto score = [&](const Translation& t) {
    return ranking_score(t.log_prob, t.ids.size(), options.length_normalize);
  };
  if (!finished.empty()) {
    // Among equal scores the first one found (shorter, then lower ranked) wins.
    std::stable_sort(finished.begin(), finished.end(),
                     [&](const Translation& a, const Translation& b) { return score(a) > score(b); });
    return finished.front();
  }
  if (beam.empty()) return Translation{};
  return Translation{beam.front().ids, beam.front().log_prob, false};
}

}  // namespace nmtrnng::decode
