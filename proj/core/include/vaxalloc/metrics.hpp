#pragma once

#include <span>
#include <string>
#include <vector>

namespace vaxalloc::metrics {

struct PredictionPair {
    double predicted = 0.0;  // doses
    double truth = 0.0;      // doses, >= 0
};

struct PrPoint {
    double threshold = 0.0;  // score cut: predicted-positive means score >= threshold
    double precision = 0.0;
    double recall = 0.0;
};

struct PrCurve {
    std::vector<PrPoint> points;  // recall-ascending
    double auc = 0.0;             // trapezoidal over recall
    double f1_at_band = 0.0;      // at the score cut matching the band
};

/// Precision-recall construction for a regression task. Ground-truth label per
/// pair: |pred - truth| <= band * truth (truth 0: positive iff pred is 0).
/// Ranking score per pair: -|pred - truth| / max(max truth over pairs, 1) —
/// an absolute-error ranking on a dataset-level scale, so the curve measures
/// how well small errors line up with within-band hits. F1 is reported at the
/// threshold -band. Throws on empty input; band must be in (0,1).
PrCurve tolerance_prf(std::span<const PredictionPair> pairs, double band);

struct ConvergenceRatio {
    double ratio = 1.0;
    bool lower_bound = false;  // set when a curve never reached the target in budget
};

/// How many times faster curve_a reaches `target` than curve_b, measured in
/// 1-based epochs of first crossing. If curve_b never reaches the target the
/// ratio uses its full budget and is flagged as a lower bound. Throws when the
/// target is above both starting losses (meaningless target).
ConvergenceRatio convergence_ratio(std::span<const double> curve_a,
                                   std::span<const double> curve_b, double target);

/// Rewards min-max scaled over the whole run, then averaged. Constant rewards
/// degrade to 0.5 with a warning.
double minmax_scaled_reward(std::span<const double> rewards);

void write_pr_curve_csv(const std::string& path, const PrCurve& curve);

} // namespace vaxalloc::metrics
