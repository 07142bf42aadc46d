#include "vaxalloc/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vaxalloc/errors.hpp"

namespace vaxalloc::num {

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void softmax_inplace(std::span<double> v) {
    if (v.empty()) throw std::invalid_argument("softmax: empty input");
    const double m = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double& x : v) {
        x = std::exp(x - m);
        sum += x;
    }
    for (double& x : v) x /= sum;
}

Vec softmax(std::span<const double> v) {
    Vec out(v.begin(), v.end());
    softmax_inplace(out);
    return out;
}

void sgd_step(std::span<double> params, std::span<const double> grads, double lr) {
    if (params.size() != grads.size())
        throw std::invalid_argument("sgd_step: parameter/gradient shape mismatch");
    if (!(lr > 0.0)) throw std::invalid_argument("sgd_step: learning rate must be positive");
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
}

void init_uniform_fanin(std::span<double> v, std::size_t fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
    for (double& x : v) x = rng.uniform(-bound, bound);
}

void init_uniform_fanin(Matrix& m, std::size_t fan_in, Rng& rng) {
    init_uniform_fanin(std::span<double>(m.data()), fan_in, rng);
}

} // namespace vaxalloc::num
