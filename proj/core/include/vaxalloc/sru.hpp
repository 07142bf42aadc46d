#pragma once

#include <span>

#include "vaxalloc/tensor.hpp"

namespace vaxalloc::sru {

/// Parameters of one recurrent layer. The recurrence is elementwise only:
/// gates see the previous cell state through v_f / v_r pointwise products,
/// never through a full matrix, which is what keeps the pre-activations
/// batchable across time.
struct SruLayerParams {
    num::Matrix w, w_f, w_r;        // hidden x input
    num::Vec v_f, v_r, b_f, b_r;    // hidden

    std::size_t hidden() const { return w.rows(); }
    std::size_t input() const { return w.cols(); }
};

/// Gradients, same shapes as the parameters.
struct SruLayerGrads {
    num::Matrix w, w_f, w_r;
    num::Vec v_f, v_r, b_f, b_r;
};

SruLayerGrads zero_grads_like(const SruLayerParams& p);
void accumulate(SruLayerGrads& into, const SruLayerGrads& from);

/// Saved intermediates of a single cell step, needed for backprop through time.
struct CellStep {
    num::Vec x, c_prev, f, r, wx, c, h;
};

/// One cell update:
///   f = sigmoid(w_f x + v_f . c_prev + b_f)
///   c = f . c_prev + (1 - f) . (w x)
///   r = sigmoid(w_r x + v_r . c_prev + b_r)
///   h = r . c + (1 - r) . x~
/// where x~ is x zero-padded to the hidden width when the layer input is
/// narrower (the highway path needs matching dims; padding is parameter-free).
void sru_cell_forward(std::span<const double> x, std::span<const double> c_prev,
                      const SruLayerParams& p, num::Vec& h_out, num::Vec& c_out,
                      CellStep* cache = nullptr);

struct LayerCache {
    std::vector<CellStep> steps;
};

/// Runs the cell over a whole sequence (rows of xs are timesteps); cell state
/// starts at zero. Returns h as a (T x hidden) matrix.
num::Matrix sru_layer_forward(const num::Matrix& xs, const SruLayerParams& p,
                              LayerCache* cache = nullptr);

/// Same outputs as sru_layer_forward, computed the parallel way: all gate
/// pre-activations batched up front, then a single elementwise scan. Only
/// valid when v_f and v_r are zero (gates independent of the running state);
/// asserts otherwise.
num::Matrix sru_layer_forward_fused(const num::Matrix& xs, const SruLayerParams& p);

/// Backprop through time. dh is the loss gradient w.r.t. every h_t
/// (T x hidden). Parameter gradients accumulate into g; when dx is non-null
/// the input gradient (T x input) is written there.
void sru_layer_backward(const SruLayerParams& p, const LayerCache& cache, const num::Matrix& dh,
                        SruLayerGrads& g, num::Matrix* dx = nullptr);

} // namespace vaxalloc::sru
