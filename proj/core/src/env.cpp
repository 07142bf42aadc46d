#include "vaxalloc/env.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace vaxalloc::rl {

double reward_fn(double allocation, double demand, double cost_of_allocation, double threshold) {
    assert(demand >= 0.0 && threshold > 0.0);
    constexpr double kOverPenalty = 0.5;
    constexpr double kCostPenalty = 1.0;
    double r = 0.0;
    if (demand > 0.0) {
        r = std::min(allocation, demand) / demand -
            kOverPenalty * std::max(0.0, allocation - demand) / demand;
    }
    r -= kCostPenalty * std::max(0.0, cost_of_allocation - threshold) / threshold;
    return r;
}

AllocationEnv::AllocationEnv(std::string state, double normalized_cost,
                             std::vector<double> demand_doses, std::size_t horizon)
    : state_(std::move(state)),
      cost_norm_(normalized_cost),
      demand_(std::move(demand_doses)),
      horizon_(horizon) {
    if (demand_.empty()) throw std::invalid_argument("AllocationEnv: empty demand series");
    if (horizon_ == 0) throw std::invalid_argument("AllocationEnv: zero horizon");

    double mean = 0.0;
    for (double d : demand_) {
        mean += d;
        demand_max_ = std::max(demand_max_, d);
    }
    mean /= double(demand_.size());
    unit_cost_ = mean > 0.0 ? cost_norm_ / mean : 0.0;

    std::vector<double> daily_cost(demand_.size());
    for (std::size_t i = 0; i < demand_.size(); ++i) daily_cost[i] = unit_cost_ * demand_[i];
    std::sort(daily_cost.begin(), daily_cost.end());
    const std::size_t n = daily_cost.size();
    const double median =
        n % 2 ? daily_cost[n / 2] : 0.5 * (daily_cost[n / 2 - 1] + daily_cost[n / 2]);
    theta_ = std::max(median, 1e-9);
    budget_ = double(horizon_) * theta_;
}

double AllocationEnv::demand_on(std::size_t day) const { return demand_[day % demand_.size()]; }

RlState AllocationEnv::observe(std::size_t day) const {
    RlState s;
    s.cost = cost_norm_;
    s.demand = demand_max_ > 0.0 ? demand_on(day) / demand_max_ : 0.0;
    s.day = std::min(1.0, double(day) / double(horizon_));
    s.budget_left = std::clamp(1.0 - spent_ / budget_, 0.0, 1.0);
    return s;
}

RlState AllocationEnv::reset() {
    day_ = 0;
    spent_ = 0.0;
    return observe(0);
}

StepResult AllocationEnv::step(std::size_t action) {
    if (action >= kAllocationLevels.size())
        throw std::invalid_argument("AllocationEnv: invalid action index");
    if (day_ >= horizon_) throw std::logic_error("AllocationEnv: stepped past the horizon");

    const double demand = demand_on(day_);
    const double allocation = kAllocationLevels[action] * demand;
    const double cost = unit_cost_ * allocation;
    StepResult out;
    out.reward = reward_fn(allocation, demand, cost, theta_);
    spent_ += cost;
    ++day_;
    out.next = observe(day_);
    out.terminal = day_ == horizon_;
    return out;
}

GridEnv::GridEnv(std::vector<double> state_costs_normalized, std::vector<double> demand_bins,
                 std::vector<double> unit_costs, std::vector<double> thresholds,
                 std::size_t state_index, std::size_t horizon, std::uint64_t seed)
    : costs_(std::move(state_costs_normalized)),
      bins_(std::move(demand_bins)),
      unit_costs_(std::move(unit_costs)),
      thetas_(std::move(thresholds)),
      state_index_(state_index),
      horizon_(horizon),
      rng_(seed) {
    if (bins_.empty() || costs_.empty()) throw std::invalid_argument("GridEnv: empty grid");
    if (costs_.size() != unit_costs_.size() || costs_.size() != thetas_.size())
        throw std::invalid_argument("GridEnv: per-state arrays disagree");
    bin_max_ = *std::max_element(bins_.begin(), bins_.end());
}

RlState GridEnv::cell_features(std::size_t state, std::size_t bin) const {
    RlState s;
    s.cost = costs_[state];
    s.demand = bin_max_ > 0.0 ? bins_[bin] / bin_max_ : 0.0;
    s.day = 0.5;          // time and budget carried as neutral constants:
    s.budget_left = 1.0;  // the optimal action per cell does not depend on them
    return s;
}

double GridEnv::cell_reward(std::size_t state, std::size_t bin, std::size_t action) const {
    const double demand = bins_[bin];
    const double allocation = kAllocationLevels[action] * demand;
    return reward_fn(allocation, demand, unit_costs_[state] * allocation, thetas_[state]);
}

RlState GridEnv::reset() {
    day_ = 0;
    bin_ = rng_.uniform_index(bins_.size());
    return cell_features(state_index_, bin_);
}

StepResult GridEnv::step(std::size_t action) {
    if (action >= kAllocationLevels.size())
        throw std::invalid_argument("GridEnv: invalid action index");
    StepResult out;
    out.reward = cell_reward(state_index_, bin_, action);
    bin_ = rng_.uniform_index(bins_.size());
    ++day_;
    out.next = cell_features(state_index_, bin_);
    out.terminal = day_ >= horizon_;
    return out;
}

} // namespace vaxalloc::rl
