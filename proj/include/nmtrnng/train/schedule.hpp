#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "nmtrnng/train/checkpoint.hpp"

namespace nmtrnng::train {

struct ScheduleDecision {
  double learning_rate = 0.0;
  // 1-based epoch whose parameters must be reloaded.
  std::optional<std::size_t> reload_epoch;

  bool halved() const { return reload_epoch.has_value(); }
};

// `history[e]` is the dev perplexity measured after epoch e + 1. When the
// latest value exceeds the best of the earlier ones, the learning rate is
// halved and the earliest best epoch is reloaded.
ScheduleDecision lr_schedule_step(std::span<const double> history, double learning_rate);

struct ScheduleOutcome {
  ScheduleDecision decision;
  const Checkpoint* reload = nullptr;
};

// Same rule, resolving the reload target among per-epoch checkpoints
// (matched on Checkpoint::epoch).
ScheduleOutcome lr_schedule_step(std::span<const double> history, double learning_rate,
                                 std::span<const Checkpoint> checkpoints);

}  // namespace nmtrnng::train
