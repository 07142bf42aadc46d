#pragma once

#include <string>
#include <vector>

#include "vaxalloc/config.hpp"

namespace vaxalloc::run {

/// Artifact locations inside the output directory.
struct ArtifactPaths {
    explicit ArtifactPaths(const std::string& dir);

    std::string features_csv, normalization_json, ingest_report_json;
    std::string predictor_ckpt, predictor_ablation_ckpt, curve_csv, curve_ablation_csv;
    std::string pr_curve_csv, metrics_json;
    std::string cost_matrix_csv, cost_summary_csv;
    std::string demand_csv, qnet_ckpt, reward_curves_csv, allocations_csv;

    std::string sweep_curve_csv(double lr, double gamma) const;

private:
    std::string dir_;
};

// Each stage reads only config inputs plus artifacts persisted by earlier
// stages, so any stage can be re-run on its own.
void run_ingest(const RunConfig& cfg);
void run_train_predictor(const RunConfig& cfg);
void run_eval_predictor(const RunConfig& cfg);
void run_simulate_costs(const RunConfig& cfg);
void run_train_agent(const RunConfig& cfg);
void run_eval_agent(const RunConfig& cfg);

/// Ingest -> train + evaluate the predictor -> simulate and aggregate costs ->
/// train the allocation agent -> greedy allocation, writing every intermediate
/// artifact along the way.
void run_pipeline(const RunConfig& cfg);

/// Learning-rate x discount grid over the agent; one reward-curve CSV per
/// cell, cells run in parallel.
void run_sweep(const RunConfig& cfg);

} // namespace vaxalloc::run
