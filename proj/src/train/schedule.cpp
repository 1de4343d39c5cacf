#include "nmtrnng/train/schedule.hpp"

#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::train {

ScheduleDecision lr_schedule_step(std::span<const double> history, double learning_rate) {
  if (history.empty()) throw ConfigError("learning-rate schedule needs at least one epoch");
  ScheduleDecision d{learning_rate, std::nullopt};
  if (history.size() == 1) return d;
  std::size_t best = 0;
  for (std::size_t e = 1; e + 1 < history.size(); ++e) {
    if (history[e] < history[best]) best = e;
  }
  if (history.back() > history[best]) {
    d.learning_rate = learning_rate / 2.0;
    d.reload_epoch = best + 1;
  }
  return d;
}

ScheduleOutcome lr_schedule_step(std::span<const double> history, double learning_rate,
                                 std::span<const Checkpoint> checkpoints) {
  ScheduleOutcome out{lr_schedule_step(history, learning_rate), nullptr};
  if (!out.decision.reload_epoch) return out;
  for (const auto& c : checkpoints) {
    if (c.epoch == *out.decision.reload_epoch) {
      out.reload = &c;
      return out;
    }
  }
  throw ConfigError("no checkpoint for epoch " + std::to_string(*out.decision.reload_epoch));
}

}  // namespace nmtrnng::train
