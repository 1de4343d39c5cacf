#include "nmtrnng/train/init.hpp"

#include "nmtrnng/core/lstm.hpp"

namespace nmtrnng::train {

void init_parameters(core::ParameterStore& store, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-kInitRange, kInitRange);
  for (auto& p : store) {
    switch (p.role) {
      case core::ParamRole::kWeight:
      case core::ParamRole::kEmbedding:
        for (auto& v : p.value.values()) v = uniform(rng);
        break;
      case core::ParamRole::kBias:
      case core::ParamRole::kOutputWeight:
        p.value.fill(0.0);
        break;
      case core::ParamRole::kLstmBias: {
        p.value.fill(0.0);
        const std::size_t d = p.value.size() / 4;
        const std::size_t forget = static_cast<std::size_t>(core::LstmGate::kForget) * d;
        for (std::size_t k = 0; k < d; ++k) p.value[forget + k] = 1.0;
        break;
      }
    }
    p.grad.fill(0.0);
  }
}

void init_parameters(model::Model& model, std::uint64_t seed) {
  init_parameters(model.parameters(), seed);
}

void randomize_parameters(core::ParameterStore& store, std::mt19937_64& rng, double range) {
  std::uniform_real_distribution<double> uniform(-range, range);
  for (auto& p : store) {
    for (auto& v : p.value.values()) v = uniform(rng);
    p.grad.fill(0.0);
  }
}

}  // namespace nmtrnng::train
