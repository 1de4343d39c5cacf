#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "nmtrnng/core/graph.hpp"

namespace nmtrnng::core {

// Differentiable operations. All vector arguments are rank-1 tensors; shape
// violations raise DimensionError naming both shapes.

Expr matvec(Expr w, Expr x);
// W·x + b
Expr affine(Expr w, Expr x, Expr b);
Expr add(Expr a, Expr b);
Expr cmult(Expr a, Expr b);
Expr scale(Expr x, double factor);
Expr tanh(Expr x);
Expr sigmoid(Expr x);
Expr concat(std::span<const Expr> parts);
Expr concat(std::initializer_list<Expr> parts);
Expr slice(Expr x, std::size_t offset, std::size_t length);
Expr dot(Expr a, Expr b);
// sum_i weights[i] * items[i]
Expr weighted_sum(std::span<const Expr> items, Expr weights);
Expr softmax(Expr logits);
Expr pick(Expr x, std::size_t index);
Expr sum(std::span<const Expr> terms);

// -log softmax(logits)[index], the softmax restricted to entries with a
// nonzero mask byte when `legal` is non-empty.
Expr pick_neg_log_softmax(Expr logits, std::size_t index,
                          std::span<const std::uint8_t> legal = {});

// Plain numerics over values, shared by decoding and tests.
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> masked_softmax(std::span<const double> logits,
                                   std::span<const std::uint8_t> legal);
std::vector<double> log_softmax(std::span<const double> logits);
// Lowest index among the maxima; restricted to legal entries if given.
std::size_t argmax(std::span<const double> values,
                   std::span<const std::uint8_t> legal = {});

}  // namespace nmtrnng::core
