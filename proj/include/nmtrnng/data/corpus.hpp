#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nmtrnng/data/dep_tree.hpp"
#include "nmtrnng/data/vocabulary.hpp"
#include "nmtrnng/rnng/action.hpp"

namespace nmtrnng::data {

inline constexpr std::size_t kDefaultMaxLength = 50;

struct RawPair {
  Sentence source;
  Sentence target;
  std::optional<ConllSentence> parse;
  std::size_t line = 0;  // 1-based line in the parallel files
};

struct FilterResult {
  std::vector<RawPair> kept;
  std::size_t dropped_empty = 0;
  std::size_t dropped_length = 0;
};

// Drops pairs with an empty side or a side longer than `max_length` tokens
// (EOS not counted).
FilterResult filter_corpus(std::vector<RawPair> pairs, std::size_t max_length = kDefaultMaxLength);

// Pairs line i of the source and target files; parse blocks are matched in
// order to the non-empty target lines and their forms must equal the target
// tokens. Throws ParseError naming the offending line.
std::vector<RawPair> align_corpus(std::vector<Sentence> source, std::vector<Sentence> target,
                                  const std::vector<ConllSentence>* parses);

// Encoded training example; both sides end in EOS.
struct SentencePair {
  std::vector<int> source;
  std::vector<int> target;
  rnng::ActionSequence actions;  // empty when no parse is available
};

std::vector<std::vector<int>> read_id_lines(std::istream& in);
void write_id_lines(std::ostream& out, const std::vector<std::vector<int>>& lines);
std::vector<rnng::ActionSequence> read_action_lines(std::istream& in, const LabelSet& labels);
void write_action_line(std::ostream& out, std::span<const rnng::Action> actions,
                       const LabelSet& labels);

}  // namespace nmtrnng::data
