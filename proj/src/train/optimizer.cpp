#include "nmtrnng/train/optimizer.hpp"

#include <cmath>

#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::train {

ClipResult clip_gradients(core::ParameterStore& store, double threshold) {
  double sq = 0.0;
  for (const auto& p : store) {
    if (!p.grad.all_finite()) {
      throw NumericError("non-finite gradient in parameter slot '" + p.name + "'");
    }
    for (double g : p.grad.values()) sq += g * g;
  }
  ClipResult result;
  result.norm = std::sqrt(sq);
  if (result.norm > threshold) {
    result.scale = threshold / result.norm;
    for (auto& p : store) {
      for (auto& g : p.grad.values()) g *= result.scale;
    }
  }
  return result;
}

void sgd_step(core::ParameterStore& store, double learning_rate) {
  if (learning_rate == 0.0) return;
  for (auto& p : store) {
    auto values = p.value.values();
    auto grads = p.grad.values();
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= learning_rate * grads[i];
  }
}

}  // namespace nmtrnng::train
