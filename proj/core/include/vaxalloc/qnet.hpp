#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vaxalloc/checkpoint.hpp"
#include "vaxalloc/rng.hpp"
#include "vaxalloc/tensor.hpp"

namespace vaxalloc::rl {

struct DenseLayer {
    num::Matrix w;  // out x in
    num::Vec b;
};

/// Action-value network: four dense layers (in -> 64 -> 64 -> 32 -> actions),
/// tanh on the hidden layers, linear output.
struct QNet {
    std::vector<DenseLayer> layers;

    std::size_t input_dim() const { return layers.front().w.cols(); }
    std::size_t action_count() const { return layers.back().w.rows(); }
};

QNet init_qnet(std::size_t input_dim, std::size_t actions, num::Rng& rng);

struct QNetCache {
    std::vector<num::Matrix> acts;  // acts[0] = input, acts[i] = layer i output (post-activation)
};

/// Batched forward: rows of x are states, rows of the result are Q-vectors.
/// Throws NumericError naming the layer if an intermediate goes non-finite.
num::Matrix qnet_forward(const num::Matrix& x, const QNet& net, QNetCache* cache = nullptr);

num::Vec qnet_forward_one(std::span<const double> state, const QNet& net);

struct QNetGrads {
    std::vector<DenseLayer> layers;
};

QNetGrads zero_grads_like(const QNet& net);

/// dout is the loss gradient at the network output (batch x actions).
void qnet_backward(const QNet& net, const QNetCache& cache, const num::Matrix& dout,
                   QNetGrads& g);

void for_each_tensor(QNet& net,
                     const std::function<void(const std::string&, std::span<double>)>& fn);
void for_each_tensor(QNetGrads& g,
                     const std::function<void(const std::string&, std::span<double>)>& fn);

std::vector<num::NamedTensor> qnet_to_tensors(const QNet& net);
QNet qnet_from_tensors(const std::vector<num::NamedTensor>& tensors);
void save_qnet(const std::string& path, const QNet& net);
QNet load_qnet(const std::string& path);

} // namespace vaxalloc::rl
