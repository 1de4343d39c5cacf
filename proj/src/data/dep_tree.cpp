#include "nmtrnng/data/dep_tree.hpp"

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>

#include "nmtrnng/core/errors.hpp"
#include "nmtrnng/rnng/arc_standard.hpp"

namespace nmtrnng::data {

using rnng::Action;
using rnng::ActionKind;

namespace {

bool dominates(const DepTree& tree, int ancestor, int node) {
  for (std::size_t steps = 0; node != kRootHead && steps <= tree.size(); ++steps) {
    if (node == ancestor) return true;
    node = tree.heads[static_cast<std::size_t>(node)];
  }
  return false;
}

}  // namespace

void validate_tree(const DepTree& tree) {
  const std::size_t m = tree.size();
  if (m == 0) throw ParseError("empty dependency tree");
  if (tree.labels.size() != m) throw ParseError("tree has mismatched head and label arrays");
  if (tree.heads[m - 1] != kRootHead) throw ParseError("EOS must be the ROOT");
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const int h = tree.heads[i];
    if (h < 0 || static_cast<std::size_t>(h) >= m || h == static_cast<int>(i)) {
      throw ParseError("token " + std::to_string(i + 1) + " has invalid head " +
                       std::to_string(h + 1));
    }
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (!dominates(tree, static_cast<int>(m - 1), static_cast<int>(i))) {
      throw ParseError("cycle through token " + std::to_string(i + 1));
    }
  }
}

bool is_projective(const DepTree& tree) {
  const int m = static_cast<int>(tree.size());
  for (int d = 0; d < m; ++d) {
    const int h = tree.heads[static_cast<std::size_t>(d)];
    if (h == kRootHead) continue;
    for (int k = std::min(d, h) + 1; k < std::max(d, h); ++k) {
      if (!dominates(tree, h, k)) return false;
    }
  }
  return true;
}

rnng::ActionSequence tree_to_actions(const DepTree& tree) {
  validate_tree(tree);
  if (!is_projective(tree)) {
    throw TransitionError("arc-standard cannot derive a non-projective tree");
  }
  const std::size_t m = tree.size();
  std::vector<int> pending(m, 0);
  for (std::size_t i = 0; i + 1 < m; ++i) ++pending[static_cast<std::size_t>(tree.heads[i])];

  rnng::ActionSequence actions;
  actions.reserve(2 * m - 1);
  std::vector<int> stack;
  std::size_t next = 0;
  while (next < m || stack.size() > 1) {
    if (stack.size() >= 2) {
      const int top = stack[stack.size() - 1];
      const int below = stack[stack.size() - 2];
      const auto t = static_cast<std::size_t>(top);
      const auto b = static_cast<std::size_t>(below);
      if (tree.heads[b] == top && pending[b] == 0) {
        actions.push_back(Action::reduce_left(tree.labels[b]));
        --pending[t];
        stack.erase(stack.end() - 2);
        continue;
      }
      if (tree.heads[t] == below && pending[t] == 0) {
        actions.push_back(Action::reduce_right(tree.labels[t]));
        --pending[b];
        stack.pop_back();
        continue;
      }
    }
    if (next == m) throw TransitionError("oracle stuck: tree is not arc-standard derivable");
    actions.push_back(Action::shift());
    stack.push_back(static_cast<int>(next++));
  }
  return actions;
}

DepTree actions_to_tree(std::span<const Action> actions, std::size_t token_count) {
  auto system = rnng::ArcStandard::with_length(token_count);
  for (std::size_t t = 0; t < actions.size(); ++t) {
    if (system.terminal()) {
      throw TransitionError("action at step " + std::to_string(t) + " after the tree is complete");
    }
    if (!system.legal().contains(actions[t].kind)) {
      throw TransitionError("illegal action at step " + std::to_string(t));
    }
    system.apply(actions[t]);
  }
  if (!system.terminal()) {
    throw TransitionError("action sequence ends at step " + std::to_string(actions.size()) +
                          " before the tree is complete");
  }
  DepTree tree;
  tree.heads.assign(token_count, kRootHead);
  tree.labels.assign(token_count, kNoLabel);
  for (const auto& arc : system.arcs()) {
    tree.heads[static_cast<std::size_t>(arc.dependent)] = arc.head;
    tree.labels[static_cast<std::size_t>(arc.dependent)] = arc.label;
  }
  return tree;
}

DepTree random_projective_tree(std::size_t token_count, std::size_t num_labels,
                               std::mt19937_64& rng) {
  if (token_count == 0 || num_labels == 0) throw Error("random tree needs tokens and labels");
  DepTree tree;
  tree.heads.assign(token_count, kRootHead);
  tree.labels.assign(token_count, kNoLabel);
  std::uniform_int_distribution<int> label_dist(0, static_cast<int>(num_labels) - 1);
  std::bernoulli_distribution cut(0.5);

  // Attaches the span [lo, hi] to `parent` as one or more adjacent subtrees.
  auto attach_span = [&](auto&& self, int lo, int hi, int parent) -> void {
    if (lo > hi) return;
    int start = lo;
    for (int k = lo; k <= hi; ++k) {
      if (k == hi || cut(rng)) {
        std::uniform_int_distribution<int> pick(start, k);
        const int h = pick(rng);
        tree.heads[static_cast<std::size_t>(h)] = parent;
        tree.labels[static_cast<std::size_t>(h)] = label_dist(rng);
        self(self, start, h - 1, h);
        self(self, h + 1, k, h);
        start = k + 1;
      }
    }
  };
  const int root = static_cast<int>(token_count) - 1;
  attach_span(attach_span, 0, root - 1, root);
  return tree;
}

std::vector<ConllSentence> read_conll(std::istream& in) {
  std::vector<ConllSentence> out;
  ConllSentence current;
  std::vector<int> raw_heads;
  std::vector<std::size_t> lines;

  auto finish = [&]() {
    if (current.forms.empty()) return;
    const std::size_t n = current.forms.size();
    for (std::size_t i = 0; i < n; ++i) {
      const int h = raw_heads[i];
      if (h < 0 || static_cast<std::size_t>(h) > n) {
        throw ParseError("line " + std::to_string(lines[i]) + ": head " +
                         std::to_string(h) + " out of range for a " +
                         std::to_string(n) + "-token sentence");
      }
      if (static_cast<std::size_t>(h) == i + 1) {
        throw ParseError("line " + std::to_string(lines[i]) + ": token is its own head");
      }
      current.heads.push_back(h == 0 ? static_cast<int>(n) : h - 1);
    }
    current.forms.emplace_back(kEosToken);
    current.heads.push_back(kRootHead);
    current.labels.emplace_back();
    DepTree shape{current.heads, std::vector<int>(n + 1, 0), {}};
    shape.labels.back() = kNoLabel;
    try {
      validate_tree(shape);
    } catch (const ParseError& e) {
      throw ParseError("sentence starting at line " + std::to_string(current.first_line) +
                       ": " + e.what());
    }
    out.push_back(std::move(current));
    current = ConllSentence{};
    raw_heads.clear();
    lines.clear();
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      finish();
      continue;
    }
    if (line[0] == '#') continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() < 4) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected index, form, head and label columns");
    }
    int index = 0;
    int head = 0;
    try {
      std::size_t used = 0;
      index = std::stoi(cols[0], &used);
      if (used != cols[0].size()) throw std::invalid_argument("index");
      head = std::stoi(cols[2], &used);
      if (used != cols[2].size()) throw std::invalid_argument("head");
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": non-numeric index or head");
    }
    if (index != static_cast<int>(current.forms.size()) + 1) {
      throw ParseError("line " + std::to_string(line_no) + ": expected token index " +
                       std::to_string(current.forms.size() + 1));
    }
    if (cols[1].empty() || cols[3].empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty form or label");
    }
    if (current.forms.empty()) current.first_line = line_no;
    current.forms.push_back(cols[1]);
    current.labels.push_back(cols[3]);
    raw_heads.push_back(head);
    lines.push_back(line_no);
  }
  finish();
  return out;
}

DepTree to_dep_tree(const ConllSentence& sentence, const LabelSet& labels) {
  DepTree tree;
  tree.heads = sentence.heads;
  tree.forms = sentence.forms;
  tree.labels.reserve(sentence.labels.size());
  for (std::size_t i = 0; i < sentence.labels.size(); ++i) {
    tree.labels.push_back(i + 1 == sentence.labels.size() ? kNoLabel
                                                          : labels.id(sentence.labels[i]));
  }
  return tree;
}

void write_conll(std::ostream& out, const DepTree& tree, std::span<const std::string> forms,
                 const LabelSet& labels) {
  const std::size_t m = tree.size();
  if (m < 2) return;
  if (forms.size() + 1 != m && forms.size() != m) {
    throw Error("write_conll: " + std::to_string(forms.size()) + " forms for a " +
                std::to_string(m) + "-token tree");
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const int h = tree.heads[i];
    const int head_column = h == static_cast<int>(m - 1) ? 0 : h + 1;
    out << (i + 1) << '\t' << forms[i] << '\t' << head_column << '\t'
        << labels.name(tree.labels[i]) << '\n';
  }
  out << '\n';
}

std::string format_action(Action action, const LabelSet& labels) {
  switch (action.kind) {
    case ActionKind::kShift: return "SHIFT";
    case ActionKind::kReduceLeft: return "REDUCE-L(" + labels.name(action.label) + ")";
    case ActionKind::kReduceRight: return "REDUCE-R(" + labels.name(action.label) + ")";
  }
  return {};
}

Action parse_action(std::string_view text, const LabelSet& labels) {
  if (text == "SHIFT") return Action::shift();
  auto reduce = [&](std::string_view prefix) -> std::optional<std::string_view> {
    if (text.size() > prefix.size() + 1 && text.substr(0, prefix.size()) == prefix &&
        text.back() == ')') {
      return text.substr(prefix.size(), text.size() - prefix.size() - 1);
    }
    return std::nullopt;
  };
  if (auto label = reduce("REDUCE-L(")) return Action::reduce_left(labels.id(*label));
  if (auto label = reduce("REDUCE-R(")) return Action::reduce_right(labels.id(*label));
  throw ParseError("unrecognized action '" + std::string(text) + "'");
}

}  // namespace nmtrnng::data
