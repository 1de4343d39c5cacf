#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace nmtrnng::rnng {

enum class ActionKind : std::uint8_t { kShift, kReduceLeft, kReduceRight };

// SHIFT, or a reduce labeled with a dependency label id. REDUCE-L makes the
// stack top the head of the item below it; REDUCE-R the mirror.
struct Action {
  ActionKind kind = ActionKind::kShift;
  int label = -1;

  static Action shift() { return Action{ActionKind::kShift, -1}; }
  static Action reduce_left(int label) { return Action{ActionKind::kReduceLeft, label}; }
  static Action reduce_right(int label) { return Action{ActionKind::kReduceRight, label}; }

  bool is_shift() const { return kind == ActionKind::kShift; }
  bool operator==(const Action&) const = default;
};

using ActionSequence = std::vector<Action>;

// Dense ids: SHIFT = 0, REDUCE-L(l) = 1 + 2l, REDUCE-R(l) = 2 + 2l.
inline std::size_t action_count(std::size_t num_labels) { return 2 * num_labels + 1; }
std::size_t action_id(Action a, std::size_t num_labels);
Action action_from_id(std::size_t id, std::size_t num_labels);

struct ActionKindSet {
  bool shift = false;
  bool reduce_left = false;
  bool reduce_right = false;

  bool contains(ActionKind k) const;
  bool empty() const { return !shift && !reduce_left && !reduce_right; }
  bool operator==(const ActionKindSet&) const = default;
};

// One byte per dense action id, nonzero where the action's kind is legal.
std::vector<std::uint8_t> legal_mask(const ActionKindSet& kinds, std::size_t num_labels);

}  // namespace nmtrnng::rnng
