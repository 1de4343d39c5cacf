#include "nmtrnng/rnng/action.hpp"

#include <string>

#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::rnng {

std::size_t action_id(Action a, std::size_t num_labels) {
  if (a.kind == ActionKind::kShift) return 0;
  if (a.label < 0 || static_cast<std::size_t>(a.label) >= num_labels) {
    throw VocabularyError("reduce label " + std::to_string(a.label) +
                          " outside label set of size " + std::to_string(num_labels));
  }
  const std::size_t base = 1 + 2 * static_cast<std::size_t>(a.label);
  return a.kind == ActionKind::kReduceLeft ? base : base + 1;
}

Action action_from_id(std::size_t id, std::size_t num_labels) {
  if (id >= action_count(num_labels)) {
    throw VocabularyError("action id " + std::to_string(id) + " out of range");
  }
  if (id == 0) return Action::shift();
  const int label = static_cast<int>((id - 1) / 2);
  return (id - 1) % 2 == 0 ? Action::reduce_left(label) : Action::reduce_right(label);
}

bool ActionKindSet::contains(ActionKind k) const {
  switch (k) {
    case ActionKind::kShift: return shift;
    case ActionKind::kReduceLeft: return reduce_left;
    case ActionKind::kReduceRight: return reduce_right;
  }
  return false;
}

std::vector<std::uint8_t> legal_mask(const ActionKindSet& kinds, std::size_t num_labels) {
  std::vector<std::uint8_t> mask(action_count(num_labels), 0);
  mask[0] = kinds.shift;
  for (std::size_t l = 0; l < num_labels; ++l) {
    mask[1 + 2 * l] = kinds.reduce_left;
    mask[2 + 2 * l] = kinds.reduce_right;
  }
  return mask;
}

}  // namespace nmtrnng::rnng
