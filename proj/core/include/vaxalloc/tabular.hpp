#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include "vaxalloc/rng.hpp"

namespace vaxalloc::rl {

/// Minimal view of a small discrete MDP, for the table-based learner.
class TabularEnv {
public:
    virtual ~TabularEnv() = default;
    virtual std::size_t cell_count() const = 0;
    virtual std::size_t action_count() const = 0;
    virtual std::size_t reset(num::Rng& rng) = 0;  // start cell of a new episode
    /// (next cell, reward, terminal)
    virtual std::tuple<std::size_t, double, bool> step(std::size_t action, num::Rng& rng) = 0;
};

struct TabularConfig {
    double gamma = 0.9;
    double alpha = 0.5;           // initial step size, decayed per-(cell,action) visit
    double alpha_decay = 0.02;    // alpha_n = alpha / (1 + decay * visits)
    double eps_start = 1.0;
    double eps_end = 0.05;
    std::size_t episodes = 4000;  // iteration cap
    std::size_t steps_per_episode = 50;
    double tol = 1e-4;            // convergence: max |dQ| within an episode
    std::size_t patience = 25;    // consecutive converged episodes required
    std::uint64_t seed = 1;
};

/// Classic table-based Q-learning run to convergence; returns the greedy
/// action per cell. Independent of the neural machinery by construction —
/// this is the reference the deep learner is checked against. Throws
/// NumericError if the table has not settled within the episode cap.
std::vector<std::size_t> tabular_q_oracle(TabularEnv& env, const TabularConfig& cfg);

} // namespace vaxalloc::rl
