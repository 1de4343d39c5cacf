#include "nmtrnng/rnng/arc_standard.hpp"

#include <string>

#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::rnng {

ArcStandard ArcStandard::with_length(std::size_t token_count) {
  if (token_count == 0) throw TransitionError("a sentence needs at least its EOS token");
  ArcStandard s;
  s.token_count_ = token_count;
  s.root_ = static_cast<int>(token_count - 1);
  return s;
}

ArcStandard ArcStandard::open_ended() { return ArcStandard(); }

bool ArcStandard::generation_done() const {
  if (token_count_) return shifted_ == *token_count_;
  return root_.has_value();
}

ActionKindSet ArcStandard::legal() const {
  ActionKindSet set;
  set.shift = !generation_done();
  if (stack_.size() >= 2) {
    set.reduce_left = true;
    // The root token must stay unattached, so it can never be the dependent.
    set.reduce_right = !(root_ && stack_.back() == *root_ && generation_done());
  }
  return set;
}

void ArcStandard::apply(Action action, bool shifted_is_end) {
  if (!legal().contains(action.kind)) {
    throw TransitionError("illegal transition at step " +
                          std::to_string(shifted_ + arcs_.size()) + " (stack depth " +
                          std::to_string(stack_.size()) + ")");
  }
  if (action.kind == ActionKind::kShift) {
    const int token = static_cast<int>(shifted_++);
    stack_.push_back(token);
    if (!token_count_ && shifted_is_end) root_ = token;
    return;
  }
  const int top = stack_.back();
  stack_.pop_back();
  const int below = stack_.back();
  stack_.pop_back();
  if (action.kind == ActionKind::kReduceLeft) {
    arcs_.push_back(Arc{below, top, action.label});
    stack_.push_back(top);
  } else {
    arcs_.push_back(Arc{top, below, action.label});
    stack_.push_back(below);
  }
}

ActionKindSet legal_actions(const ArcStandard& state) { return state.legal(); }

}  // namespace nmtrnng::rnng
