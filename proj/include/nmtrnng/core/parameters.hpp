#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nmtrnng/core/tensor.hpp"

namespace nmtrnng::core {

// How a slot is initialized; see train::init_parameters.
enum class ParamRole {
  kWeight,        // uniform
  kEmbedding,     // uniform
  kBias,          // zero
  kLstmBias,      // zero, forget-gate block one
  kOutputWeight,  // zero (softmax layers)
};

struct ParamId {
  std::size_t index = 0;
  bool operator==(const ParamId&) const = default;
};

struct Parameter {
  std::string name;
  ParamRole role = ParamRole::kWeight;
  Tensor value;
  Tensor grad;
};

// Named parameter slots with gradient accumulators of identical shape.
// A name can be registered only once, so a shared weight is a single slot
// that every use site reads and accumulates into.
class ParameterStore {
 public:
  ParamId add(std::string name, std::vector<std::size_t> shape,
              ParamRole role = ParamRole::kWeight);

  Parameter& operator[](ParamId id) { return slots_.at(id.index); }
  const Parameter& operator[](ParamId id) const { return slots_.at(id.index); }

  std::optional<ParamId> find(std::string_view name) const;
  ParamId id(std::string_view name) const;

  std::size_t size() const { return slots_.size(); }
  std::size_t scalar_count() const;

  auto begin() { return slots_.begin(); }
  auto end() { return slots_.end(); }
  auto begin() const { return slots_.begin(); }
  auto end() const { return slots_.end(); }

  void zero_grad();
  double grad_norm() const;

 private:
  std::vector<Parameter> slots_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

}  // namespace nmtrnng::core
