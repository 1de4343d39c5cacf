#pragma once

#include "nmtrnng/core/parameters.hpp"

namespace nmtrnng::train {

struct ClipResult {
  double norm = 0.0;   // global L2 norm before clipping
  double scale = 1.0;  // factor applied to every gradient
};

// Rescales all gradients by tau / ||g|| when the global norm exceeds tau.
// Throws NumericError naming the first slot holding a non-finite gradient.
ClipResult clip_gradients(core::ParameterStore& store, double threshold);

// theta <- theta - lr * grad
void sgd_step(core::ParameterStore& store, double learning_rate);

}  // namespace nmtrnng::train
