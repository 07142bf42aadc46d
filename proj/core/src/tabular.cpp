#include "vaxalloc/tabular.hpp"

#include <algorithm>
#include <cmath>

#include "vaxalloc/errors.hpp"

namespace vaxalloc::rl {

std::vector<std::size_t> tabular_q_oracle(TabularEnv& env, const TabularConfig& cfg) {
    const std::size_t cells = env.cell_count();
    const std::size_t actions = env.action_count();
    if (cells == 0 || cells > 1000)
        throw std::invalid_argument("tabular_q_oracle: cell count must be in [1, 1000]");

    std::vector<double> q(cells * actions, 0.0);
    std::vector<std::uint32_t> visits(cells * actions, 0);
    num::Rng rng(cfg.seed);

    const auto greedy = [&](std::size_t cell) {
        std::size_t best = 0;
        for (std::size_t a = 1; a < actions; ++a)
            if (q[cell * actions + a] > q[cell * actions + best]) best = a;
        return best;
    };

    std::size_t settled = 0;
    for (std::size_t episode = 0; episode < cfg.episodes; ++episode) {
        const double frac = cfg.episodes > 1 ? double(episode) / double(cfg.episodes - 1) : 1.0;
        const double eps = cfg.eps_start + (cfg.eps_end - cfg.eps_start) * frac;

        std::size_t cell = env.reset(rng);
        double max_dq = 0.0;
        for (std::size_t t = 0; t < cfg.steps_per_episode; ++t) {
            const std::size_t action =
                rng.uniform() < eps ? rng.uniform_index(actions) : greedy(cell);
            const auto [next, reward, done] = env.step(action, rng);

            const std::size_t i = cell * actions + action;
            const double alpha = cfg.alpha / (1.0 + cfg.alpha_decay * double(visits[i]++));
            double best_next = 0.0;
            if (!done) {
                best_next = q[next * actions];
                for (std::size_t a = 1; a < actions; ++a)
                    best_next = std::max(best_next, q[next * actions + a]);
            }
            const double delta = alpha * (reward + cfg.gamma * best_next - q[i]);
            q[i] += delta;
            max_dq = std::max(max_dq, std::abs(delta));

            cell = next;
            if (done) break;
        }

        settled = max_dq < cfg.tol ? settled + 1 : 0;
        if (settled >= cfg.patience) {
            std::vector<std::size_t> policy(cells);
            for (std::size_t c = 0; c < cells; ++c) policy[c] = greedy(c);
            return policy;
        }
    }
    throw NumericError("table did not converge within " + std::to_string(cfg.episodes) +
                           " episodes",
                       "tabular_q_oracle");
}

} // namespace vaxalloc::rl
