#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nmtrnng/core/graph.hpp"
#include "nmtrnng/core/parameters.hpp"

namespace nmtrnng::core {

using LossBuilder = std::function<Expr(Graph&)>;

struct SlotError {
  std::string name;
  double max_relative_error = 0.0;
  std::size_t worst_offset = 0;
};

struct GradCheckReport {
  double loss = 0.0;
  double max_relative_error = 0.0;
  std::string worst_slot;
  std::size_t worst_offset = 0;
  std::size_t checked_scalars = 0;
  std::vector<SlotError> slots;
};

// Compares the tape's gradient of `build` against central differences,
// entry by entry, over every slot (or only `slots` when given). The error of
// one entry is |analytic - numeric| / max(1, |analytic|). Parameter values
// are restored exactly afterwards; gradients are left holding the analytic
// result.
GradCheckReport grad_check(ParameterStore& store, const LossBuilder& build,
                           double epsilon = 1e-5,
                           std::span<const ParamId> slots = {});

}  // namespace nmtrnng::core
