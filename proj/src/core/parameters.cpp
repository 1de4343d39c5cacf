#include "nmtrnng/core/parameters.hpp"

#include <cmath>

#include "nmtrnng/core/errors.hpp"

namespace nmtrnng::core {

ParamId ParameterStore::add(std::string name, std::vector<std::size_t> shape,
                            ParamRole role) {
  if (by_name_.count(name)) {
    throw ConfigError("parameter slot '" + name + "' registered twice");
  }
  Parameter p;
  p.name = name;
  p.role = role;
  p.value = Tensor(shape);
  p.grad = Tensor(std::move(shape));
  by_name_.emplace(std::move(name), slots_.size());
  slots_.push_back(std::move(p));
  return ParamId{slots_.size() - 1};
}

std::optional<ParamId> ParameterStore::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return ParamId{it->second};
}

ParamId ParameterStore::id(std::string_view name) const {
  auto found = find(name);
  if (!found) throw ConfigError("no parameter slot named '" + std::string(name) + "'");
  return *found;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : slots_) n += p.value.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : slots_) p.grad.fill(0.0);
}

double ParameterStore::grad_norm() const {
  double sq = 0.0;
  for (const auto& p : slots_) {
    for (double g : p.grad.values()) sq += g * g;
  }
  return std::sqrt(sq);
}

}  // namespace nmtrnng::core
