#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vaxalloc/checkpoint.hpp"
#include "vaxalloc/ingest.hpp"
#include "vaxalloc/rng.hpp"
#include "vaxalloc/sru.hpp"

namespace vaxalloc::sru {

/// Additive attention over the per-timestep hidden vectors:
/// score_t = score . tanh(proj h_t), alpha = softmax(score), context = sum alpha_t h_t.
struct AttentionParams {
    num::Matrix proj;  // hidden x hidden
    num::Vec score;    // hidden
};

struct DenseParams {
    num::Vec w;
    double b = 0.0;
};

struct PredictorConfig {
    std::size_t input_dim = 3;
    std::size_t hidden = 10;
    bool use_attention = true;
    std::size_t fixed_len = 240;  // no-attention mode pads/truncates sequences to this length
    std::size_t warmup = 14;      // first day index eligible as a training-pair end
    std::size_t epochs = 300;
    double lr = 0.01;
    std::size_t batch = 16;
    std::uint64_t seed = 42;
};

/// The full demand predictor: two stacked recurrent layers, the attention
/// block, and a single-unit dense head. Without attention the head instead
/// reads the flattened (fixed_len x hidden) second-layer outputs.
struct SruModel {
    PredictorConfig cfg;
    SruLayerParams layer1, layer2;
    AttentionParams attention;
    DenseParams dense;
};

SruModel init_model(const PredictorConfig& cfg, num::Rng& rng);

struct AttentionCache {
    num::Matrix z;      // tanh(proj h_t), T x hidden
    num::Vec alpha;     // softmax weights, length T
    num::Vec context;   // hidden
};

struct AttentionGrads {
    num::Matrix proj;
    num::Vec score;
};

/// Softmax-weighted combination of hidden vectors; accepts any sequence
/// length >= 1. Throws on an empty sequence.
num::Vec attention_context(const num::Matrix& hidden_seq, const AttentionParams& p,
                           AttentionCache* cache = nullptr);

/// dcontext -> gradients; adds the hidden-sequence gradient into dh.
void attention_backward(const AttentionParams& p, const num::Matrix& hidden_seq,
                        const AttentionCache& cache, std::span<const double> dcontext,
                        AttentionGrads& g, num::Matrix& dh);

struct ForwardCache {
    num::Matrix xs;  // the (possibly padded) input actually consumed, T x input_dim
    LayerCache l1, l2;
    num::Matrix h1, h2;
    AttentionCache att;
};

/// Scaled-demand prediction for one sequence (rows of xs are timesteps of
/// normalized features). Throws NumericError naming the failing block if an
/// intermediate goes non-finite.
double predictor_forward(const num::Matrix& xs, const SruModel& m, ForwardCache* cache = nullptr);

struct ModelGrads {
    SruLayerGrads layer1, layer2;
    AttentionGrads attention;
    DenseParams dense;  // reused as gradient storage
};

ModelGrads zero_grads_like(const SruModel& m);
void accumulate(ModelGrads& into, const ModelGrads& from);

/// dy is the loss gradient at the scalar output. When dx is non-null the
/// gradient w.r.t. the consumed input is written there (same shape as
/// cache.xs).
void predictor_backward(const SruModel& m, const ForwardCache& cache, double dy, ModelGrads& g,
                        num::Matrix* dx = nullptr);

// Flat parameter traversal in a fixed order; used by the optimizer step,
// gradient verification and checkpointing.
void for_each_tensor(SruModel& m,
                     const std::function<void(const std::string&, std::span<double>)>& fn);
void for_each_tensor(ModelGrads& g,
                     const std::function<void(const std::string&, std::span<double>)>& fn);

std::vector<num::NamedTensor> model_to_tensors(const SruModel& m);
SruModel model_from_tensors(const std::vector<num::NamedTensor>& tensors);
void save_model(const std::string& path, const SruModel& m);
SruModel load_model(const std::string& path);

struct EpochLoss {
    double train_mse = 0.0;
    double val_mse = 0.0;
};

struct TrainResult {
    SruModel model;
    std::vector<EpochLoss> curve;  // one entry per epoch
};

/// Supervised training on next-day targets. Pairs are (prefix [0..t],
/// y_{t+1}/population) for t >= warmup; minibatch SGD on mean-squared error;
/// bit-deterministic for a fixed seed. Throws NumericError naming the epoch
/// if the loss goes non-finite.
TrainResult train_predictor(const std::vector<ingest::FeatureSequence>& dataset,
                            const PredictorConfig& cfg);

void write_curve_csv(const std::string& path, const std::vector<EpochLoss>& curve);

/// Forward pass on the prefix [0..upto], denormalized to whole doses
/// (output x population, clamped at 0, rounded).
std::int64_t predict_demand(const ingest::FeatureSequence& seq, std::size_t upto,
                            const SruModel& m);

} // namespace vaxalloc::sru
