#pragma once

#include <cstdint>
#include <random>

#include "nmtrnng/core/parameters.hpp"
#include "nmtrnng/model/model.hpp"

namespace nmtrnng::train {

inline constexpr double kInitRange = 0.1;

// Weights and embeddings uniform in [-0.1, 0.1]; biases and softmax weights
// zero; the forget-gate block of every LSTM bias one. Slots are filled in
// registration order from one generator seeded with `seed`. A tied slot is
// a single slot and is drawn once.
void init_parameters(core::ParameterStore& store, std::uint64_t seed);
void init_parameters(model::Model& model, std::uint64_t seed);

// Every slot, softmax and biases included, uniform in [-range, range].
// Used to exercise all gradient paths in checks and synthetic tests.
void randomize_parameters(core::ParameterStore& store, std::mt19937_64& rng, double range);

}  // namespace nmtrnng::train
