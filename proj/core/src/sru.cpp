#include "vaxalloc/sru.hpp"

#include <cassert>
#include <cstring>

#include "vaxalloc/ops.hpp"

namespace vaxalloc::sru {

SruLayerGrads zero_grads_like(const SruLayerParams& p) {
    SruLayerGrads g;
    g.w = num::Matrix(p.w.rows(), p.w.cols());
    g.w_f = num::Matrix(p.w_f.rows(), p.w_f.cols());
    g.w_r = num::Matrix(p.w_r.rows(), p.w_r.cols());
    g.v_f.assign(p.v_f.size(), 0.0);
    g.v_r.assign(p.v_r.size(), 0.0);
    g.b_f.assign(p.b_f.size(), 0.0);
    g.b_r.assign(p.b_r.size(), 0.0);
    return g;
}

void accumulate(SruLayerGrads& into, const SruLayerGrads& from) {
    num::axpy(1.0, from.w.data(), std::span<double>(into.w.data()));
    num::axpy(1.0, from.w_f.data(), std::span<double>(into.w_f.data()));
    num::axpy(1.0, from.w_r.data(), std::span<double>(into.w_r.data()));
    num::axpy(1.0, from.v_f, std::span<double>(into.v_f));
    num::axpy(1.0, from.v_r, std::span<double>(into.v_r));
    num::axpy(1.0, from.b_f, std::span<double>(into.b_f));
    num::axpy(1.0, from.b_r, std::span<double>(into.b_r));
}

void sru_cell_forward(std::span<const double> x, std::span<const double> c_prev,
                      const SruLayerParams& p, num::Vec& h_out, num::Vec& c_out,
                      CellStep* cache) {
    const std::size_t hidden = p.hidden();
    assert(x.size() == p.input());
    assert(c_prev.size() == hidden);
    assert(p.input() <= hidden && "highway path assumes input no wider than hidden");

    num::Vec f(hidden), r(hidden), wx(hidden);
    num::matvec(p.w_f, x, f);
    num::matvec(p.w_r, x, r);
    num::matvec(p.w, x, wx);
    for (std::size_t j = 0; j < hidden; ++j) {
        f[j] = num::sigmoid(f[j] + p.v_f[j] * c_prev[j] + p.b_f[j]);
        r[j] = num::sigmoid(r[j] + p.v_r[j] * c_prev[j] + p.b_r[j]);
    }

    c_out.resize(hidden);
    h_out.resize(hidden);
    for (std::size_t j = 0; j < hidden; ++j) {
        c_out[j] = f[j] * c_prev[j] + (1.0 - f[j]) * wx[j];
        const double xh = j < x.size() ? x[j] : 0.0;  // zero padding of the highway input
        h_out[j] = r[j] * c_out[j] + (1.0 - r[j]) * xh;
    }

    if (cache) {
        cache->x.assign(x.begin(), x.end());
        cache->c_prev.assign(c_prev.begin(), c_prev.end());
        cache->f = std::move(f);
        cache->r = std::move(r);
        cache->wx = std::move(wx);
        cache->c = c_out;
        cache->h = h_out;
    }
}

num::Matrix sru_layer_forward(const num::Matrix& xs, const SruLayerParams& p, LayerCache* cache) {
    const std::size_t steps = xs.rows();
    const std::size_t hidden = p.hidden();
    num::Matrix hs(steps, hidden);
    if (cache) cache->steps.resize(steps);

    num::Vec c(hidden, 0.0), h, c_next;
    for (std::size_t t = 0; t < steps; ++t) {
        std::span<const double> x(xs.row(t), xs.cols());
        sru_cell_forward(x, c, p, h, c_next, cache ? &cache->steps[t] : nullptr);
        std::memcpy(hs.row(t), h.data(), hidden * sizeof(double));
        c = c_next;
    }
    return hs;
}

num::Matrix sru_layer_forward_fused(const num::Matrix& xs, const SruLayerParams& p) {
    for (double v : p.v_f) assert(v == 0.0 && "fused path requires state-free gates");
    for (double v : p.v_r) assert(v == 0.0 && "fused path requires state-free gates");

    const std::size_t steps = xs.rows();
    const std::size_t hidden = p.hidden();

    // phase 1: every gate pre-activation for every timestep at once
    num::Matrix f(steps, hidden), r(steps, hidden), wx(steps, hidden);
    for (std::size_t t = 0; t < steps; ++t) {
        std::span<const double> x(xs.row(t), xs.cols());
        num::matvec(p.w_f, x, {f.row(t), hidden});
        num::matvec(p.w_r, x, {r.row(t), hidden});
        num::matvec(p.w, x, {wx.row(t), hidden});
        for (std::size_t j = 0; j < hidden; ++j) {
            f.at(t, j) = num::sigmoid(f.at(t, j) + p.b_f[j]);
            r.at(t, j) = num::sigmoid(r.at(t, j) + p.b_r[j]);
        }
    }

    // phase 2: elementwise scan, independent per hidden unit
    num::Matrix hs(steps, hidden);
    for (std::size_t j = 0; j < hidden; ++j) {
        double c = 0.0;
        for (std::size_t t = 0; t < steps; ++t) {
            c = f.at(t, j) * c + (1.0 - f.at(t, j)) * wx.at(t, j);
            const double xh = j < xs.cols() ? xs.at(t, j) : 0.0;
            hs.at(t, j) = r.at(t, j) * c + (1.0 - r.at(t, j)) * xh;
        }
    }
    return hs;
}

void sru_layer_backward(const SruLayerParams& p, const LayerCache& cache, const num::Matrix& dh,
                        SruLayerGrads& g, num::Matrix* dx) {
    const std::size_t steps = cache.steps.size();
    const std::size_t hidden = p.hidden();
    const std::size_t input = p.input();
    assert(dh.rows() == steps && dh.cols() == hidden);
    if (dx) *dx = num::Matrix(steps, input);

    num::Vec dc_next(hidden, 0.0);
    num::Vec dc_total(hidden), dpre_f(hidden), dpre_r(hidden), dwx(hidden);
    for (std::size_t t = steps; t-- > 0;) {
        const CellStep& s = cache.steps[t];
        const double* dht = dh.row(t);

        for (std::size_t j = 0; j < hidden; ++j) {
            dc_total[j] = dht[j] * s.r[j] + dc_next[j];
            const double xh = j < input ? s.x[j] : 0.0;
            const double dr = dht[j] * (s.c[j] - xh);
            dpre_r[j] = dr * s.r[j] * (1.0 - s.r[j]);
            const double df = dc_total[j] * (s.c_prev[j] - s.wx[j]);
            dpre_f[j] = df * s.f[j] * (1.0 - s.f[j]);
            dwx[j] = dc_total[j] * (1.0 - s.f[j]);
        }

        num::outer_accum(g.w_f, dpre_f, s.x);
        num::outer_accum(g.w_r, dpre_r, s.x);
        num::outer_accum(g.w, dwx, s.x);
        for (std::size_t j = 0; j < hidden; ++j) {
            g.v_f[j] += dpre_f[j] * s.c_prev[j];
            g.v_r[j] += dpre_r[j] * s.c_prev[j];
            g.b_f[j] += dpre_f[j];
            g.b_r[j] += dpre_r[j];
            dc_next[j] = dc_total[j] * s.f[j] + dpre_f[j] * p.v_f[j] + dpre_r[j] * p.v_r[j];
        }

        if (dx) {
            std::span<double> dxt(dx->row(t), input);
            num::matvec_t_accum(p.w_f, dpre_f, dxt);
            num::matvec_t_accum(p.w_r, dpre_r, dxt);
            num::matvec_t_accum(p.w, dwx, dxt);
            // highway contribution: only the first `input` lanes carry x
            for (std::size_t j = 0; j < input; ++j) dxt[j] += dht[j] * (1.0 - s.r[j]);
        }
    }
}

} // namespace vaxalloc::sru
