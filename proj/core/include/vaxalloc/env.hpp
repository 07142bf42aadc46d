#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vaxalloc/rng.hpp"

namespace vaxalloc::rl {

/// Discrete allocation levels, as fractions of the day's predicted demand.
inline constexpr std::array<double, 6> kAllocationLevels{0.0, 0.25, 0.5, 0.75, 1.0, 1.25};

/// Observation fed to the Q-network; every component lies in [0,1].
struct RlState {
    double cost = 0.0;         // normalized supply cost of the state
    double demand = 0.0;       // normalized predicted demand for the current day
    double day = 0.0;          // day index / horizon
    double budget_left = 1.0;  // 1 - spent / episode budget, clamped

    std::array<double, 4> as_array() const { return {cost, demand, day, budget_left}; }
};

/// Piecewise-linear reward: full credit for meeting demand, an over-allocation
/// penalty above it, and a cost penalty once the day's allocation cost exceeds
/// the threshold. With zero demand only the cost term applies.
///   r = min(a,d)/d - 0.5 max(0, a-d)/d - max(0, c - theta)/theta
double reward_fn(double allocation, double demand, double cost_of_allocation, double threshold);

struct StepResult {
    RlState next;
    double reward = 0.0;
    bool terminal = false;
};

/// Episodic per-state environment. One episode is `horizon()` steps.
class Environment {
public:
    virtual ~Environment() = default;
    virtual RlState reset() = 0;
    virtual StepResult step(std::size_t action) = 0;
    virtual std::size_t horizon() const = 0;
};

/// The production environment: a state's normalized cost scalar plus its
/// predicted daily demand series. Demand days cycle when the horizon exceeds
/// the series length. The per-dose unit cost scales the normalized cost so
/// that allocating the mean daily demand costs about one threshold unit, and
/// the threshold is the median daily cost of demand-matching allocation.
class AllocationEnv : public Environment {
public:
    AllocationEnv(std::string state, double normalized_cost, std::vector<double> demand_doses,
                  std::size_t horizon);

    RlState reset() override;
    StepResult step(std::size_t action) override;
    std::size_t horizon() const override { return horizon_; }

    const std::string& state_name() const { return state_; }
    double demand_on(std::size_t day) const;   // doses
    double unit_cost() const { return unit_cost_; }
    double threshold() const { return theta_; }
    double episode_budget() const { return budget_; }

private:
    RlState observe(std::size_t day) const;

    std::string state_;
    double cost_norm_;
    std::vector<double> demand_;
    std::size_t horizon_;
    double demand_max_ = 0.0;
    double unit_cost_ = 0.0;
    double theta_ = 0.0;
    double budget_ = 0.0;
    std::size_t day_ = 0;
    double spent_ = 0.0;
};

/// Discretized environment over (state, demand-bin) cells with exogenous
/// uniformly-random bin transitions. Exposes both the feature view used by
/// the Q-network and the cell view used by the tabular oracle, so the two
/// learners face the same MDP.
class GridEnv : public Environment {
public:
    /// demand_bins: bin-center demand (doses) per bin, shared across states.
    GridEnv(std::vector<double> state_costs_normalized, std::vector<double> demand_bins,
            std::vector<double> unit_costs, std::vector<double> thresholds, std::size_t state_index,
            std::size_t horizon, std::uint64_t seed);

    RlState reset() override;
    StepResult step(std::size_t action) override;
    std::size_t horizon() const override { return horizon_; }

    std::size_t bin_count() const { return bins_.size(); }
    std::size_t state_count() const { return costs_.size(); }

    /// Features of a (state, bin) cell — the exact query used when comparing
    /// the trained network against the tabular policy.
    RlState cell_features(std::size_t state, std::size_t bin) const;
    double cell_reward(std::size_t state, std::size_t bin, std::size_t action) const;

private:
    std::vector<double> costs_, bins_, unit_costs_, thetas_;
    std::size_t state_index_, horizon_;
    double bin_max_;
    num::Rng rng_;
    std::size_t bin_ = 0, day_ = 0;
};

} // namespace vaxalloc::rl
