#pragma once

#include <span>

#include "vaxalloc/rng.hpp"
#include "vaxalloc/tensor.hpp"

namespace vaxalloc::num {

/// Numerically stable logistic function; exact for |x| well past 700.
double sigmoid(double x);

/// Softmax with max subtraction. Output sums to 1, invariant under adding a
/// constant to every input.
Vec softmax(std::span<const double> v);
void softmax_inplace(std::span<double> v);

/// p <- p - lr * g, elementwise. Throws on shape mismatch.
void sgd_step(std::span<double> params, std::span<const double> grads, double lr);

/// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
void init_uniform_fanin(Matrix& m, std::size_t fan_in, Rng& rng);
void init_uniform_fanin(std::span<double> v, std::size_t fan_in, Rng& rng);

} // namespace vaxalloc::num
