#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nmtrnng/core/tensor.hpp"
#include "nmtrnng/model/model.hpp"

namespace nmtrnng::train {

inline constexpr int kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  core::Tensor value;
  bool operator==(const NamedTensor&) const = default;
};

// Everything needed to resume training or decode: parameters, the model
// shape, schedule state and the generator state.
struct Checkpoint {
  std::size_t epoch = 0;
  double learning_rate = 0.0;
  double dev_perplexity = 0.0;
  std::uint64_t seed = 0;
  std::string rng_state;
  std::vector<double> perplexity_history;
  std::size_t best_epoch = 0;
  double best_perplexity = 0.0;
  std::uint64_t vocab_hash = 0;
  model::ModelConfig model;
  std::vector<NamedTensor> tensors;

  bool operator==(const Checkpoint&) const = default;
};

// Copies every slot of `model` into `checkpoint.tensors` and records its
// shape. Other fields are left to the caller.
Checkpoint capture(const model::Model& model);

// Writes the stored tensors into matching slots. Every slot of `model` must
// be present; extra tensors are an error unless `allow_extra` (used to load
// a joint checkpoint into a translator-only model).
void restore_parameters(model::Model& model, const Checkpoint& checkpoint,
                        bool allow_extra = false);

// Text container, one value per token as a C99 hex float so that a
// save/load cycle is bit-exact:
//   nmtrnng-checkpoint 1
//   <header: one JSON object on one line>
//   tensor <name> <rank> <dims...>
//   <values>
//   ...
//   end
void save_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string hex_double(double v);
double parse_hex_double(const std::string& text);

}  // namespace nmtrnng::train
