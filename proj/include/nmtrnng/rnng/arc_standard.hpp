#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nmtrnng/rnng/action.hpp"

namespace nmtrnng::rnng {

struct Arc {
  int dependent = 0;
  int head = 0;
  int label = 0;
  bool operator==(const Arc&) const = default;
};

// Symbolic arc-standard configuration over tokens 0..M-1, shifted left to
// right. The last token (EOS) is the root; it may collect dependents but is
// never attached. With a known length the sentence ends after M shifts;
// without one it ends when the shifted token is flagged as EOS.
class ArcStandard {
 public:
  static ArcStandard with_length(std::size_t token_count);
  static ArcStandard open_ended();

  ActionKindSet legal() const;
  bool generation_done() const;
  bool terminal() const { return generation_done() && stack_.size() == 1; }

  // `shifted_is_end` marks the shifted token as EOS in open-ended mode and
  // is ignored when the length is known. Throws TransitionError.
  void apply(Action action, bool shifted_is_end = false);

  const std::vector<int>& stack() const { return stack_; }
  std::size_t shifted() const { return shifted_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  std::optional<std::size_t> token_count() const { return token_count_; }
  std::optional<int> root_token() const { return root_; }

 private:
  ArcStandard() = default;

  std::optional<std::size_t> token_count_;
  std::optional<int> root_;
  std::vector<int> stack_;
  std::size_t shifted_ = 0;
  std::vector<Arc> arcs_;
};

ActionKindSet legal_actions(const ArcStandard& state);

}  // namespace nmtrnng::rnng
