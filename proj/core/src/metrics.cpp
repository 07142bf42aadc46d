#include "vaxalloc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "vaxalloc/errors.hpp"
#include "vaxalloc/format.hpp"
#include "vaxalloc/log.hpp"

namespace vaxalloc::metrics {
namespace {

struct Scored {
    double score;
    bool positive;
};

double f1_from(std::size_t tp, std::size_t predicted_pos, std::size_t positives) {
    if (tp == 0) return 0.0;
    const double precision = double(tp) / double(predicted_pos);
    const double recall = double(tp) / double(positives);
    return 2.0 * precision * recall / (precision + recall);
}

} // namespace

PrCurve tolerance_prf(std::span<const PredictionPair> pairs, double band) {
    if (pairs.empty()) throw std::invalid_argument("tolerance_prf: no prediction pairs");
    if (!(band > 0.0 && band < 1.0))
        throw std::invalid_argument("tolerance_prf: band must be in (0,1)");

    double truth_max = 0.0;
    for (const auto& p : pairs) {
        if (p.truth < 0.0) throw std::invalid_argument("tolerance_prf: negative truth value");
        truth_max = std::max(truth_max, p.truth);
    }
    const double scale = std::max(truth_max, 1.0);

    std::vector<Scored> scored;
    scored.reserve(pairs.size());
    std::size_t positives = 0;
    for (const auto& p : pairs) {
        const double err = std::abs(p.predicted - p.truth);
        const bool label = p.truth == 0.0 ? p.predicted == 0.0 : err <= band * p.truth;
        positives += label;
        scored.push_back({-err / scale, label});
    }

    PrCurve curve;
    if (positives == 0) {
        // nothing can ever be recalled; the curve is empty and F1/AUC are 0
        return curve;
    }

    std::sort(scored.begin(), scored.end(),
              [](const Scored& a, const Scored& b) { return a.score > b.score; });

    // sweep the cut across distinct score values, best first; remember the
    // confusion counts at the last cut still within the band (score >= -band)
    std::size_t tp = 0;
    std::size_t band_tp = 0, band_pp = 0;
    for (std::size_t i = 0; i < scored.size(); ++i) {
        tp += scored[i].positive;
        const bool boundary = i + 1 == scored.size() || scored[i + 1].score != scored[i].score;
        if (!boundary) continue;
        const std::size_t predicted_pos = i + 1;
        if (scored[i].score >= -band) {
            band_tp = tp;
            band_pp = predicted_pos;
        }
        curve.points.push_back({scored[i].score, double(tp) / double(predicted_pos),
                                double(tp) / double(positives)});
    }
    curve.f1_at_band = f1_from(band_tp, std::max<std::size_t>(band_pp, 1), positives);

    // trapezoid over recall, anchored at (recall 0, first precision)
    double auc = 0.0;
    double prev_recall = 0.0, prev_precision = curve.points.front().precision;
    for (const auto& pt : curve.points) {
        auc += (pt.recall - prev_recall) * 0.5 * (pt.precision + prev_precision);
        prev_recall = pt.recall;
        prev_precision = pt.precision;
    }
    curve.auc = auc;
    return curve;
}

ConvergenceRatio convergence_ratio(std::span<const double> curve_a,
                                   std::span<const double> curve_b, double target) {
    if (curve_a.empty() || curve_b.empty())
        throw std::invalid_argument("convergence_ratio: empty loss curve");
    if (target >= curve_a.front() && target >= curve_b.front())
        throw std::invalid_argument(
            "convergence_ratio: target above both starting losses is meaningless");

    const auto first_reach = [](std::span<const double> curve, double t) -> std::size_t {
        for (std::size_t e = 0; e < curve.size(); ++e)
            if (curve[e] <= t) return e + 1;  // 1-based epoch
        return 0;                             // never
    };

    const std::size_t ea = first_reach(curve_a, target);
    const std::size_t eb = first_reach(curve_b, target);

    ConvergenceRatio out;
    if (ea != 0 && eb != 0) {
        out.ratio = double(eb) / double(ea);
    } else if (ea != 0) {
        out.ratio = double(curve_b.size()) / double(ea);  // b censored at its budget
        out.lower_bound = true;
    } else if (eb != 0) {
        out.ratio = double(eb) / double(curve_a.size());  // a censored: ratio at most this
        out.lower_bound = true;
    } else {
        out.ratio = 1.0;
        out.lower_bound = true;
    }
    return out;
}

double minmax_scaled_reward(std::span<const double> rewards) {
    if (rewards.size() < 2)
        throw std::invalid_argument("minmax_scaled_reward: need at least 2 rewards");
    const auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
    if (*hi - *lo <= 0.0) {
        log::warn("minmax_scaled_reward: constant rewards, returning 0.5");
        return 0.5;
    }
    double acc = 0.0;
    for (double r : rewards) acc += (r - *lo) / (*hi - *lo);
    return acc / double(rewards.size());
}

void write_pr_curve_csv(const std::string& path, const PrCurve& curve) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    out << "threshold,precision,recall\n";
    for (const auto& pt : curve.points)
        out << fmt_double(pt.threshold) << ',' << fmt_double(pt.precision) << ','
            << fmt_double(pt.recall) << '\n';
}

} // namespace vaxalloc::metrics
