#pragma once

#include <cstddef>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nmtrnng/data/vocabulary.hpp"
#include "nmtrnng/rnng/action.hpp"

namespace nmtrnng::data {

inline constexpr int kRootHead = -1;
inline constexpr int kNoLabel = -1;

// Dependency tree over M tokens whose last token is EOS, the ROOT. heads[i]
// is the 0-based index of token i's head; the EOS slot holds kRootHead.
struct DepTree {
  std::vector<int> heads;
  std::vector<int> labels;
  std::vector<std::string> forms;  // optional; EOS included when present

  std::size_t size() const { return heads.size(); }
  // Heads and labels only.
  bool same_structure(const DepTree& other) const {
    return heads == other.heads && labels == other.labels;
  }
};

// Throws ParseError unless the tree is a single-rooted, acyclic tree with
// EOS as the only ROOT.
void validate_tree(const DepTree& tree);

bool is_projective(const DepTree& tree);

// Arc-standard static oracle: reduces as soon as a subtree is complete.
// Output has M SHIFTs and M - 1 reduces. Throws on non-projective input.
rnng::ActionSequence tree_to_actions(const DepTree& tree);

// Replays a legal, terminal sequence over `token_count` tokens. Throws
// TransitionError naming the offending step index.
DepTree actions_to_tree(std::span<const rnng::Action> actions, std::size_t token_count);

// Uniform head in every interval, subtrees of each side split at random cut
// points; covers every projective tree. `token_count` includes EOS.
DepTree random_projective_tree(std::size_t token_count, std::size_t num_labels,
                               std::mt19937_64& rng);

// CoNLL-style block as read from disk: 4 tab-separated columns
// (index, form, head, label), head 0 meaning the root. EOS is appended and
// the file's root tokens are re-attached to it.
struct ConllSentence {
  std::vector<std::string> forms;   // EOS included
  std::vector<int> heads;           // 0-based, kRootHead for EOS
  std::vector<std::string> labels;  // "" for EOS
  std::size_t first_line = 0;

  std::size_t words() const { return forms.empty() ? 0 : forms.size() - 1; }
};

std::vector<ConllSentence> read_conll(std::istream& in);
DepTree to_dep_tree(const ConllSentence& sentence, const LabelSet& labels);

// Writes one block per tree (EOS omitted) followed by a blank line.
void write_conll(std::ostream& out, const DepTree& tree, std::span<const std::string> forms,
                 const LabelSet& labels);

std::string format_action(rnng::Action action, const LabelSet& labels);
rnng::Action parse_action(std::string_view text, const LabelSet& labels);

}  // namespace nmtrnng::data
