#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vaxalloc/env.hpp"
#include "vaxalloc/qnet.hpp"
#include "vaxalloc/replay.hpp"
#include "vaxalloc/rng.hpp"

namespace vaxalloc::rl {

struct AgentConfig {
    double gamma = 0.9;
    double lr = 0.1;
    std::size_t minibatch = 16;
    double eps_max = 1.0;
    double eps_min = 0.001;
    double eps_decay = 0.0001;
    std::size_t episodes = 10000;    // M
    std::size_t iterations = 1000;   // T, steps per episode
    std::size_t target_sync = 100;   // SGD steps between target refreshes
    std::size_t replay_capacity = 10000;
    std::size_t warmup_factor = 10;  // SGD starts after warmup_factor * minibatch experiences
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError naming the field
};

/// Exponentially decaying exploration schedule, clamped to [eps_min, eps_max]:
/// eps = eps_min + (eps_max - eps_min) * exp(-decay * episode).
double epsilon_at(std::size_t episode, const AgentConfig& cfg);

/// Uniform with probability eps, otherwise argmax with lowest-index ties.
std::size_t select_action(std::span<const double> q_values, double eps, num::Rng& rng);

/// y = r + gamma * max(next_q); terminal transitions return r alone.
double bellman_target(double reward, double gamma, std::span<const double> next_q, bool terminal);

/// Root-mean-square log error with negative values clamped at zero inside the
/// log1p (the log is undefined below -1; clamping keeps the loss total).
double rmsle_loss(std::span<const double> targets, std::span<const double> predictions);

/// d loss / d predictions for rmsle_loss. Zero where the clamp is active.
num::Vec rmsle_grad(std::span<const double> targets, std::span<const double> predictions);

/// G = sum_k gamma^k r_k over a recorded episode.
double discounted_return(std::span<const double> rewards, double gamma);

struct EpisodeStat {
    double epsilon = 0.0;
    double avg_reward = 0.0;
};

struct StateCurve {
    std::string state;
    std::vector<EpisodeStat> episodes;
    double reward_min = 0.0, reward_max = 0.0;  // over every step of the run

    /// Per-episode average reward min-max scaled over the state's whole run.
    double scaled(std::size_t episode) const;
};

struct AgentResult {
    QNet net;
    std::vector<StateCurve> curves;  // one per environment, same order
};

/// Deep Q-learning over a set of per-state environments, trained sequentially
/// with a shared network. Per state: fresh replay buffer; per episode: the
/// first step acts uniformly at random, later steps are eps-greedy; one SGD
/// step per timestep once the buffer passes warm-up, minimizing the RMSLE
/// between Bellman targets (from the frozen target copy) and the online
/// Q-values of the taken actions. Bit-deterministic for a fixed seed.
AgentResult train_agent(const std::vector<Environment*>& envs,
                        const std::vector<std::string>& names, const AgentConfig& cfg);

struct AllocationDay {
    std::size_t day = 0;
    double predicted_demand = 0.0;  // doses
    std::int64_t allocated = 0;     // doses
    double reward = 0.0;
    double cum_cost = 0.0;
};

struct AllocationResult {
    std::string state;
    std::vector<AllocationDay> days;
    std::int64_t total_doses = 0;
    double total_reward = 0.0;
    double discounted = 0.0;  // discounted_return of the step rewards
};

/// Greedy (eps = 0) rollout of the trained network over one environment.
AllocationResult greedy_allocate(const QNet& net, AllocationEnv& env, double gamma);

void write_reward_curves_csv(const std::string& path, const std::vector<StateCurve>& curves);
void write_allocations_csv(const std::string& path,
                           const std::vector<AllocationResult>& allocations);

} // namespace vaxalloc::rl
