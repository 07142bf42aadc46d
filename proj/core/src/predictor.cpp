#include "vaxalloc/predictor.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "vaxalloc/errors.hpp"
#include "vaxalloc/format.hpp"
#include "vaxalloc/log.hpp"
#include "vaxalloc/ops.hpp"

namespace vaxalloc::sru {
namespace {

SruLayerParams init_layer(std::size_t input, std::size_t hidden, num::Rng& rng) {
    SruLayerParams p;
    p.w = num::Matrix(hidden, input);
    p.w_f = num::Matrix(hidden, input);
    p.w_r = num::Matrix(hidden, input);
    p.v_f.resize(hidden);
    p.v_r.resize(hidden);
    p.b_f.assign(hidden, 0.0);
    p.b_r.assign(hidden, 0.0);
    num::init_uniform_fanin(p.w, input, rng);
    num::init_uniform_fanin(p.w_f, input, rng);
    num::init_uniform_fanin(p.w_r, input, rng);
    num::init_uniform_fanin(std::span<double>(p.v_f), hidden, rng);
    num::init_uniform_fanin(std::span<double>(p.v_r), hidden, rng);
    return p;
}

/// Pads with zero rows at the end, or keeps the most recent `len` rows.
num::Matrix pad_or_truncate(const num::Matrix& xs, std::size_t len) {
    num::Matrix out(len, xs.cols());
    const std::size_t keep = std::min(len, xs.rows());
    const std::size_t from = xs.rows() > len ? xs.rows() - len : 0;
    for (std::size_t t = 0; t < keep; ++t)
        std::memcpy(out.row(t), xs.row(from + t), xs.cols() * sizeof(double));
    return out;
}

} // namespace

SruModel init_model(const PredictorConfig& cfg, num::Rng& rng) {
    SruModel m;
    m.cfg = cfg;
    m.layer1 = init_layer(cfg.input_dim, cfg.hidden, rng);
    m.layer2 = init_layer(cfg.hidden, cfg.hidden, rng);
    m.attention.proj = num::Matrix(cfg.hidden, cfg.hidden);
    m.attention.score.resize(cfg.hidden);
    num::init_uniform_fanin(m.attention.proj, cfg.hidden, rng);
    num::init_uniform_fanin(std::span<double>(m.attention.score), cfg.hidden, rng);
    const std::size_t dense_in = cfg.use_attention ? cfg.hidden : cfg.fixed_len * cfg.hidden;
    m.dense.w.resize(dense_in);
    num::init_uniform_fanin(std::span<double>(m.dense.w), dense_in, rng);
    m.dense.b = 0.0;
    return m;
}

num::Vec attention_context(const num::Matrix& hidden_seq, const AttentionParams& p,
                           AttentionCache* cache) {
    const std::size_t steps = hidden_seq.rows();
    const std::size_t hidden = hidden_seq.cols();
    if (steps == 0) throw std::invalid_argument("attention_context: empty sequence");

    num::Matrix z(steps, hidden);
    num::Vec scores(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        std::span<const double> h(hidden_seq.row(t), hidden);
        std::span<double> zt(z.row(t), hidden);
        num::matvec(p.proj, h, zt);
        for (double& v : zt) v = std::tanh(v);
        scores[t] = num::dot(p.score, zt);
    }
    num::Vec alpha = num::softmax(scores);

    num::Vec context(hidden, 0.0);
    for (std::size_t t = 0; t < steps; ++t)
        num::axpy(alpha[t], {hidden_seq.row(t), hidden}, context);

    if (cache) {
        cache->z = std::move(z);
        cache->alpha = std::move(alpha);
        cache->context = context;
    }
    return context;
}

void attention_backward(const AttentionParams& p, const num::Matrix& hidden_seq,
                        const AttentionCache& cache, std::span<const double> dcontext,
                        AttentionGrads& g, num::Matrix& dh) {
    const std::size_t steps = hidden_seq.rows();
    const std::size_t hidden = hidden_seq.cols();

    // context = sum alpha_t h_t
    num::Vec dalpha(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        dalpha[t] = num::dot(dcontext, {hidden_seq.row(t), hidden});
        num::axpy(cache.alpha[t], dcontext, {dh.row(t), hidden});
    }

    // softmax
    double inner = 0.0;
    for (std::size_t t = 0; t < steps; ++t) inner += cache.alpha[t] * dalpha[t];
    num::Vec dscore_t(steps);
    for (std::size_t t = 0; t < steps; ++t) dscore_t[t] = cache.alpha[t] * (dalpha[t] - inner);

    // score_t = score . z_t,  z_t = tanh(proj h_t)
    num::Vec dpre(hidden);
    for (std::size_t t = 0; t < steps; ++t) {
        std::span<const double> zt(cache.z.row(t), hidden);
        num::axpy(dscore_t[t], zt, g.score);
        for (std::size_t j = 0; j < hidden; ++j)
            dpre[j] = dscore_t[t] * p.score[j] * (1.0 - zt[j] * zt[j]);
        num::outer_accum(g.proj, dpre, {hidden_seq.row(t), hidden});
        num::matvec_t_accum(p.proj, dpre, {dh.row(t), hidden});
    }
}

double predictor_forward(const num::Matrix& xs, const SruModel& m, ForwardCache* cache) {
    if (xs.rows() == 0) throw std::invalid_argument("predictor_forward: empty sequence");
    assert(xs.cols() == m.cfg.input_dim);

    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    c.xs = m.cfg.use_attention ? xs : pad_or_truncate(xs, m.cfg.fixed_len);

    c.h1 = sru_layer_forward(c.xs, m.layer1, &c.l1);
    num::ensure_finite(c.h1.data(), "sru layer 1");
    c.h2 = sru_layer_forward(c.h1, m.layer2, &c.l2);
    num::ensure_finite(c.h2.data(), "sru layer 2");

    double out;
    if (m.cfg.use_attention) {
        const num::Vec context = attention_context(c.h2, m.attention, &c.att);
        num::ensure_finite(context, "attention");
        out = num::dot(m.dense.w, context) + m.dense.b;
    } else {
        assert(m.dense.w.size() == c.h2.size());
        out = num::dot(m.dense.w, c.h2.data()) + m.dense.b;
    }
    num::ensure_finite(out, "dense head");
    return out;
}

ModelGrads zero_grads_like(const SruModel& m) {
    ModelGrads g;
    g.layer1 = zero_grads_like(m.layer1);
    g.layer2 = zero_grads_like(m.layer2);
    g.attention.proj = num::Matrix(m.attention.proj.rows(), m.attention.proj.cols());
    g.attention.score.assign(m.attention.score.size(), 0.0);
    g.dense.w.assign(m.dense.w.size(), 0.0);
    g.dense.b = 0.0;
    return g;
}

void accumulate(ModelGrads& into, const ModelGrads& from) {
    accumulate(into.layer1, from.layer1);
    accumulate(into.layer2, from.layer2);
    num::axpy(1.0, from.attention.proj.data(), std::span<double>(into.attention.proj.data()));
    num::axpy(1.0, from.attention.score, std::span<double>(into.attention.score));
    num::axpy(1.0, from.dense.w, std::span<double>(into.dense.w));
    into.dense.b += from.dense.b;
}

void predictor_backward(const SruModel& m, const ForwardCache& cache, double dy, ModelGrads& g,
                        num::Matrix* dx) {
    const std::size_t steps = cache.h2.rows();
    const std::size_t hidden = m.cfg.hidden;

    num::Matrix dh2(steps, hidden);
    if (m.cfg.use_attention) {
        num::Vec dcontext(hidden);
        for (std::size_t j = 0; j < hidden; ++j) {
            dcontext[j] = dy * m.dense.w[j];
            g.dense.w[j] += dy * cache.att.context[j];
        }
        g.dense.b += dy;
        attention_backward(m.attention, cache.h2, cache.att, dcontext, g.attention, dh2);
    } else {
        for (std::size_t i = 0; i < cache.h2.size(); ++i) {
            dh2.data()[i] = dy * m.dense.w[i];
            g.dense.w[i] += dy * cache.h2.data()[i];
        }
        g.dense.b += dy;
    }

    num::Matrix dh1(cache.h1.rows(), cache.h1.cols());
    sru_layer_backward(m.layer2, cache.l2, dh2, g.layer2, &dh1);
    sru_layer_backward(m.layer1, cache.l1, dh1, g.layer1, dx);
}

namespace {

template <typename Model, typename Fn>
void visit_tensors(Model& m, const Fn& fn) {
    fn("layer1/w", std::span<double>(m.layer1.w.data()));
    fn("layer1/w_f", std::span<double>(m.layer1.w_f.data()));
    fn("layer1/w_r", std::span<double>(m.layer1.w_r.data()));
    fn("layer1/v_f", std::span<double>(m.layer1.v_f));
    fn("layer1/v_r", std::span<double>(m.layer1.v_r));
    fn("layer1/b_f", std::span<double>(m.layer1.b_f));
    fn("layer1/b_r", std::span<double>(m.layer1.b_r));
    fn("layer2/w", std::span<double>(m.layer2.w.data()));
    fn("layer2/w_f", std::span<double>(m.layer2.w_f.data()));
    fn("layer2/w_r", std::span<double>(m.layer2.w_r.data()));
    fn("layer2/v_f", std::span<double>(m.layer2.v_f));
    fn("layer2/v_r", std::span<double>(m.layer2.v_r));
    fn("layer2/b_f", std::span<double>(m.layer2.b_f));
    fn("layer2/b_r", std::span<double>(m.layer2.b_r));
    fn("attention/proj", std::span<double>(m.attention.proj.data()));
    fn("attention/score", std::span<double>(m.attention.score));
    fn("dense/w", std::span<double>(m.dense.w));
    fn("dense/b", std::span<double>(&m.dense.b, 1));
}

} // namespace

void for_each_tensor(SruModel& m,
                     const std::function<void(const std::string&, std::span<double>)>& fn) {
    visit_tensors(m, fn);
}

void for_each_tensor(ModelGrads& g,
                     const std::function<void(const std::string&, std::span<double>)>& fn) {
    visit_tensors(g, fn);
}

std::vector<num::NamedTensor> model_to_tensors(const SruModel& m) {
    std::vector<num::NamedTensor> tensors;
    tensors.push_back({"meta/config",
                       {5},
                       {double(m.cfg.input_dim), double(m.cfg.hidden),
                        m.cfg.use_attention ? 1.0 : 0.0, double(m.cfg.fixed_len),
                        double(m.cfg.warmup)}});
    auto& mm = const_cast<SruModel&>(m);  // visit_tensors only reads through the spans here
    visit_tensors(mm, [&](const std::string& name, std::span<double> data) {
        tensors.push_back({name, {data.size()}, {data.begin(), data.end()}});
    });
    return tensors;
}

SruModel model_from_tensors(const std::vector<num::NamedTensor>& tensors) {
    const auto find = [&](const std::string& name) -> const num::NamedTensor& {
        for (const auto& t : tensors)
            if (t.name == name) return t;
        throw SchemaError("checkpoint missing tensor: " + name);
    };
    const auto& meta = find("meta/config").data;
    if (meta.size() != 5) throw SchemaError("bad meta/config tensor");
    PredictorConfig cfg;
    cfg.input_dim = std::size_t(meta[0]);
    cfg.hidden = std::size_t(meta[1]);
    cfg.use_attention = meta[2] != 0.0;
    cfg.fixed_len = std::size_t(meta[3]);
    cfg.warmup = std::size_t(meta[4]);

    num::Rng rng(0);
    SruModel m = init_model(cfg, rng);
    for_each_tensor(m, [&](const std::string& name, std::span<double> data) {
        const auto& t = find(name);
        if (t.data.size() != data.size())
            throw SchemaError("checkpoint tensor size mismatch: " + name);
        std::copy(t.data.begin(), t.data.end(), data.begin());
    });
    return m;
}

void save_model(const std::string& path, const SruModel& m) {
    num::write_checkpoint(path, model_to_tensors(m));
}

SruModel load_model(const std::string& path) {
    return model_from_tensors(num::read_checkpoint(path));
}

namespace {

struct Pair {
    std::size_t seq;   // index into dataset
    std::size_t end;   // prefix is [0..end], target is y[end+1]
};

num::Matrix prefix_matrix(const ingest::FeatureSequence& s, std::size_t end) {
    num::Matrix xs(end + 1, 3);
    for (std::size_t t = 0; t <= end; ++t)
        for (std::size_t f = 0; f < 3; ++f) xs.at(t, f) = s.x[t][f];
    return xs;
}

double mse_over(const std::vector<ingest::FeatureSequence>& dataset, const std::vector<Pair>& pairs,
                const SruModel& m) {
    if (pairs.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& pr : pairs) {
        const auto& s = dataset[pr.seq];
        const double pred = predictor_forward(prefix_matrix(s, pr.end), m);
        const double target = s.y[pr.end + 1] / s.population;
        acc += (pred - target) * (pred - target);
    }
    return acc / double(pairs.size());
}

} // namespace

TrainResult train_predictor(const std::vector<ingest::FeatureSequence>& dataset,
                            const PredictorConfig& cfg) {
    if (!(cfg.lr > 0.0)) throw std::invalid_argument("train_predictor: lr must be positive");

    std::vector<Pair> train_pairs, val_pairs;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& s = dataset[i];
        for (std::size_t end = cfg.warmup; end + 1 < s.x.size(); ++end) {
            const std::size_t target_idx = end + 1;
            if (target_idx < s.train_end)
                train_pairs.push_back({i, end});
            else if (target_idx < s.val_end)
                val_pairs.push_back({i, end});
        }
    }
    if (train_pairs.empty())
        throw std::invalid_argument("train_predictor: no training pairs (sequences too short?)");

    num::Rng rng(cfg.seed);
    num::Rng init_rng = rng.derive(0);
    num::Rng shuffle_rng = rng.derive(1);
    SruModel model = init_model(cfg, init_rng);

    TrainResult result;
    std::vector<std::size_t> order(train_pairs.size());
    std::iota(order.begin(), order.end(), 0);

    ForwardCache cache;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with our own rng keeps the permutation platform-stable
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);

        for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
            const std::size_t stop = std::min(start + cfg.batch, order.size());
            ModelGrads grads = zero_grads_like(model);
            const double inv = 1.0 / double(stop - start);
            for (std::size_t k = start; k < stop; ++k) {
                const Pair pr = train_pairs[order[k]];
                const auto& s = dataset[pr.seq];
                const double pred = predictor_forward(prefix_matrix(s, pr.end), model, &cache);
                const double target = s.y[pr.end + 1] / s.population;
                predictor_backward(model, cache, 2.0 * (pred - target) * inv, grads);
            }
            std::vector<std::span<double>> plist, glist;
            for_each_tensor(model, [&](const std::string&, std::span<double> p) {
                plist.push_back(p);
            });
            for_each_tensor(grads, [&](const std::string&, std::span<double> g) {
                glist.push_back(g);
            });
            for (std::size_t k = 0; k < plist.size(); ++k)
                num::sgd_step(plist[k], glist[k], cfg.lr);
        }

        EpochLoss loss;
        loss.train_mse = mse_over(dataset, train_pairs, model);
        loss.val_mse = mse_over(dataset, val_pairs, model);
        if (!std::isfinite(loss.train_mse) || !std::isfinite(loss.val_mse))
            throw NumericError("training diverged at epoch " + std::to_string(epoch),
                               "train_predictor");
        result.curve.push_back(loss);
    }

    result.model = std::move(model);
    return result;
}

void write_curve_csv(const std::string& path, const std::vector<EpochLoss>& curve) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    out << "epoch,train_mse,val_mse\n";
    for (std::size_t e = 0; e < curve.size(); ++e)
        out << e << ',' << fmt_double(curve[e].train_mse) << ',' << fmt_double(curve[e].val_mse)
            << '\n';
}

std::int64_t predict_demand(const ingest::FeatureSequence& seq, std::size_t upto,
                            const SruModel& m) {
    if (upto >= seq.x.size())
        throw std::invalid_argument("predict_demand: index beyond available features");
    const double scaled = predictor_forward(prefix_matrix(seq, upto), m);
    if (scaled < 0.0) {
        log::warn("negative demand prediction for " + seq.state + ", clamped to 0");
        return 0;
    }
    return std::llround(scaled * seq.population);
}

} // namespace vaxalloc::sru
