#include "vaxalloc/qnet.hpp"

#include <cassert>
#include <cmath>

#include "vaxalloc/errors.hpp"
#include "vaxalloc/ops.hpp"

namespace vaxalloc::rl {
namespace {
constexpr std::size_t kHidden[] = {64, 64, 32};
}

QNet init_qnet(std::size_t input_dim, std::size_t actions, num::Rng& rng) {
    QNet net;
    std::size_t in = input_dim;
    for (std::size_t width : kHidden) {
        DenseLayer L;
        L.w = num::Matrix(width, in);
        L.b.assign(width, 0.0);
        num::init_uniform_fanin(L.w, in, rng);
        net.layers.push_back(std::move(L));
        in = width;
    }
    DenseLayer out;
    out.w = num::Matrix(actions, in);
    out.b.assign(actions, 0.0);
    num::init_uniform_fanin(out.w, in, rng);
    net.layers.push_back(std::move(out));
    return net;
}

num::Matrix qnet_forward(const num::Matrix& x, const QNet& net, QNetCache* cache) {
    assert(x.cols() == net.input_dim());
    const std::size_t batch = x.rows();
    if (cache) {
        cache->acts.resize(net.layers.size() + 1);
        cache->acts[0] = x;
    }

    num::Matrix cur = x;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const DenseLayer& L = net.layers[li];
        const bool last = li + 1 == net.layers.size();
        num::Matrix next(batch, L.w.rows());
        for (std::size_t bi = 0; bi < batch; ++bi) {
            const double* in = cur.row(bi);
            double* out = next.row(bi);
            for (std::size_t o = 0; o < L.w.rows(); ++o) {
                const double* wrow = L.w.row(o);
                double acc = L.b[o];
                for (std::size_t i = 0; i < L.w.cols(); ++i) acc += wrow[i] * in[i];
                out[o] = last ? acc : std::tanh(acc);
            }
        }
        num::ensure_finite(next.data(), "qnet layer " + std::to_string(li + 1));
        cur = std::move(next);
        if (cache) cache->acts[li + 1] = cur;
    }
    return cur;
}

num::Vec qnet_forward_one(std::span<const double> state, const QNet& net) {
    num::Matrix x(1, state.size());
    std::copy(state.begin(), state.end(), x.row(0));
    num::Matrix q = qnet_forward(x, net);
    return {q.row(0), q.row(0) + q.cols()};
}

QNetGrads zero_grads_like(const QNet& net) {
    QNetGrads g;
    for (const auto& L : net.layers) {
        DenseLayer z;
        z.w = num::Matrix(L.w.rows(), L.w.cols());
        z.b.assign(L.b.size(), 0.0);
        g.layers.push_back(std::move(z));
    }
    return g;
}

void qnet_backward(const QNet& net, const QNetCache& cache, const num::Matrix& dout,
                   QNetGrads& g) {
    assert(cache.acts.size() == net.layers.size() + 1);
    const std::size_t batch = dout.rows();

    num::Matrix delta = dout;  // gradient at the current layer's pre-activation (output layer is linear)
    for (std::size_t li = net.layers.size(); li-- > 0;) {
        const DenseLayer& L = net.layers[li];
        const num::Matrix& in = cache.acts[li];
        DenseLayer& gl = g.layers[li];

        for (std::size_t bi = 0; bi < batch; ++bi) {
            const double* d = delta.row(bi);
            const double* a = in.row(bi);
            for (std::size_t o = 0; o < L.w.rows(); ++o) {
                gl.b[o] += d[o];
                double* gw = gl.w.row(o);
                for (std::size_t i = 0; i < L.w.cols(); ++i) gw[i] += d[o] * a[i];
            }
        }

        if (li == 0) break;
        num::Matrix dprev(batch, L.w.cols(), 0.0);
        for (std::size_t bi = 0; bi < batch; ++bi) {
            const double* d = delta.row(bi);
            double* dp = dprev.row(bi);
            for (std::size_t o = 0; o < L.w.rows(); ++o) {
                const double* wrow = L.w.row(o);
                for (std::size_t i = 0; i < L.w.cols(); ++i) dp[i] += d[o] * wrow[i];
            }
            // through the tanh of layer li-1
            const double* a = in.row(bi);
            for (std::size_t i = 0; i < L.w.cols(); ++i) dp[i] *= 1.0 - a[i] * a[i];
        }
        delta = std::move(dprev);
    }
}

void for_each_tensor(QNet& net,
                     const std::function<void(const std::string&, std::span<double>)>& fn) {
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        fn("dense" + std::to_string(li + 1) + "/w", std::span<double>(net.layers[li].w.data()));
        fn("dense" + std::to_string(li + 1) + "/b", std::span<double>(net.layers[li].b));
    }
}

void for_each_tensor(QNetGrads& g,
                     const std::function<void(const std::string&, std::span<double>)>& fn) {
    for (std::size_t li = 0; li < g.layers.size(); ++li) {
        fn("dense" + std::to_string(li + 1) + "/w", std::span<double>(g.layers[li].w.data()));
        fn("dense" + std::to_string(li + 1) + "/b", std::span<double>(g.layers[li].b));
    }
}

std::vector<num::NamedTensor> qnet_to_tensors(const QNet& net) {
    std::vector<num::NamedTensor> tensors;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const auto& L = net.layers[li];
        tensors.push_back({"dense" + std::to_string(li + 1) + "/w",
                           {L.w.rows(), L.w.cols()},
                           L.w.data()});
        tensors.push_back({"dense" + std::to_string(li + 1) + "/b", {L.b.size()}, L.b});
    }
    return tensors;
}

QNet qnet_from_tensors(const std::vector<num::NamedTensor>& tensors) {
    QNet net;
    for (std::size_t li = 0;; ++li) {
        const std::string wname = "dense" + std::to_string(li + 1) + "/w";
        const std::string bname = "dense" + std::to_string(li + 1) + "/b";
        const num::NamedTensor* wt = nullptr;
        const num::NamedTensor* bt = nullptr;
        for (const auto& t : tensors) {
            if (t.name == wname) wt = &t;
            if (t.name == bname) bt = &t;
        }
        if (!wt) break;
        if (!bt || wt->shape.size() != 2) throw SchemaError("malformed qnet checkpoint");
        DenseLayer L;
        L.w = num::Matrix(wt->shape[0], wt->shape[1]);
        L.w.data() = wt->data;
        L.b = bt->data;
        net.layers.push_back(std::move(L));
    }
    if (net.layers.empty()) throw SchemaError("qnet checkpoint has no layers");
    return net;
}

void save_qnet(const std::string& path, const QNet& net) {
    num::write_checkpoint(path, qnet_to_tensors(net));
}

QNet load_qnet(const std::string& path) { return qnet_from_tensors(num::read_checkpoint(path)); }

} // namespace vaxalloc::rl
