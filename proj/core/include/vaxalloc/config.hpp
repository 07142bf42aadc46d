#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vaxalloc/agent.hpp"
#include "vaxalloc/costsim.hpp"
#include "vaxalloc/predictor.hpp"

namespace vaxalloc::run {

/// Everything a run needs, loaded from a sectioned key=value file. Unknown
/// keys are rejected (exit code 2 names the field); referenced data paths must
/// exist at load time (missing ones are exit code 3).
struct RunConfig {
    struct DataPaths {
        std::string vaccinations;
        std::string population;
        std::string statemeta;
    } data;

    sru::PredictorConfig predictor;
    bool predictor_ablation = true;  // also train the opposite attention variant

    struct CostConfig {
        std::uint64_t seed = 7;
        cost::AggregateMode aggregate_mode = cost::AggregateMode::product;
    } costs;

    rl::AgentConfig agent;
    std::vector<std::string> agent_states;  // empty = every ingested state

    struct SweepConfig {
        std::vector<double> lrs{0.1, 0.2, 0.3};
        std::vector<double> gammas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    } sweep;

    std::string output_dir = "out";
};

RunConfig default_config();

/// Parses and validates. Environment overrides applied afterwards:
/// VAXALLOC_OUT replaces output_dir, VAXALLOC_SEED replaces every stage seed.
RunConfig load_config(const std::string& path);

void apply_env_overrides(RunConfig& cfg);

/// Emits the config back in its file syntax (used by --print-config).
void print_config(std::ostream& out, const RunConfig& cfg);

} // namespace vaxalloc::run
