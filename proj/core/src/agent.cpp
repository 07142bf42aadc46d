#include "vaxalloc/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "vaxalloc/errors.hpp"
#include "vaxalloc/format.hpp"
#include "vaxalloc/ops.hpp"

namespace vaxalloc::rl {

void AgentConfig::validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in (0,1]", "agent.gamma");
    if (!(lr > 0.0)) throw ConfigError("learning rate must be positive", "agent.lr");
    if (minibatch == 0) throw ConfigError("minibatch must be positive", "agent.minibatch");
    if (!(eps_max >= eps_min && eps_min >= 0.0 && eps_max <= 1.0))
        throw ConfigError("need 0 <= eps_min <= eps_max <= 1", "agent.eps");
    if (eps_decay < 0.0) throw ConfigError("eps_decay must be non-negative", "agent.eps_decay");
    if (episodes == 0) throw ConfigError("episodes must be positive", "agent.episodes");
    if (iterations == 0) throw ConfigError("iterations must be positive", "agent.iterations");
    if (target_sync == 0) throw ConfigError("target_sync must be positive", "agent.target_sync");
    if (replay_capacity < minibatch)
        throw ConfigError("replay capacity below minibatch size", "agent.replay_capacity");
}

double epsilon_at(std::size_t episode, const AgentConfig& cfg) {
    return cfg.eps_min +
           (cfg.eps_max - cfg.eps_min) * std::exp(-cfg.eps_decay * double(episode));
}

std::size_t select_action(std::span<const double> q_values, double eps, num::Rng& rng) {
    if (rng.uniform() < eps) return rng.uniform_index(q_values.size());
    std::size_t best = 0;
    for (std::size_t i = 1; i < q_values.size(); ++i)
        if (q_values[i] > q_values[best]) best = i;
    return best;
}

double bellman_target(double reward, double gamma, std::span<const double> next_q,
                      bool terminal) {
    if (terminal) return reward;
    return reward + gamma * *std::max_element(next_q.begin(), next_q.end());
}

double rmsle_loss(std::span<const double> targets, std::span<const double> predictions) {
    if (targets.empty() || targets.size() != predictions.size())
        throw std::invalid_argument("rmsle_loss: need equal-length non-empty inputs");
    double acc = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double e =
            std::log1p(std::max(targets[i], 0.0)) - std::log1p(std::max(predictions[i], 0.0));
        acc += e * e;
    }
    return std::sqrt(acc / double(targets.size()));
}

num::Vec rmsle_grad(std::span<const double> targets, std::span<const double> predictions) {
    const double loss = rmsle_loss(targets, predictions);
    num::Vec g(predictions.size(), 0.0);
    if (loss <= 0.0) return g;
    const double k = double(targets.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] <= 0.0) continue;  // clamp active
        const double e = std::log1p(std::max(targets[i], 0.0)) - std::log1p(predictions[i]);
        g[i] = -e / (k * loss * (1.0 + predictions[i]));
    }
    return g;
}

double discounted_return(std::span<const double> rewards, double gamma) {
    double g = 0.0;
    double w = 1.0;
    for (double r : rewards) {
        g += w * r;
        w *= gamma;
    }
    return g;
}

double StateCurve::scaled(std::size_t episode) const {
    const double span = reward_max - reward_min;
    if (!(span > 0.0)) return 0.5;
    return (episodes[episode].avg_reward - reward_min) / span;
}

AgentResult train_agent(const std::vector<Environment*>& envs,
                        const std::vector<std::string>& names, const AgentConfig& cfg) {
    cfg.validate();
    if (envs.empty()) throw std::invalid_argument("train_agent: need at least one environment");
    if (envs.size() != names.size())
        throw std::invalid_argument("train_agent: names/envs size mismatch");

    num::Rng root(cfg.seed);
    num::Rng init_rng = root.derive(0);
    num::Rng act_rng = root.derive(1);
    num::Rng replay_rng = root.derive(2);

    constexpr std::size_t kActions = kAllocationLevels.size();
    QNet online = init_qnet(4, kActions, init_rng);
    QNet target = online;

    // flattened parameter views; the layer shapes never change after init
    std::vector<std::span<double>> params;
    for_each_tensor(online, [&](const std::string&, std::span<double> p) { params.push_back(p); });

    AgentResult result;
    const std::size_t warmup = cfg.warmup_factor * cfg.minibatch;
    std::size_t sgd_steps = 0;

    num::Matrix batch_x(cfg.minibatch, 4), batch_nx(cfg.minibatch, 4);
    QNetCache cache;

    for (std::size_t si = 0; si < envs.size(); ++si) {
        Environment& env = *envs[si];
        ReplayMemory memory(cfg.replay_capacity);
        StateCurve curve;
        curve.state = names[si];
        bool first_reward = true;

        for (std::size_t episode = 0; episode < cfg.episodes; ++episode) {
            const double eps = epsilon_at(episode, cfg);
            RlState state = env.reset();
            double reward_sum = 0.0;
            std::size_t steps = 0;

            for (std::size_t t = 0; t < cfg.iterations; ++t) {
                std::size_t action;
                if (t == 0) {
                    action = act_rng.uniform_index(kActions);  // literal first-step random branch
                } else {
                    const num::Vec q = qnet_forward_one(state.as_array(), online);
                    action = select_action(q, eps, act_rng);
                }

                StepResult sr = env.step(action);
                memory.push({state, action, sr.reward, sr.next, sr.terminal});
                reward_sum += sr.reward;
                ++steps;
                if (first_reward) {
                    curve.reward_min = curve.reward_max = sr.reward;
                    first_reward = false;
                } else {
                    curve.reward_min = std::min(curve.reward_min, sr.reward);
                    curve.reward_max = std::max(curve.reward_max, sr.reward);
                }
                state = sr.next;

                if (memory.size() >= std::max(warmup, cfg.minibatch)) {
                    const auto batch = memory.sample(cfg.minibatch, replay_rng);
                    for (std::size_t k = 0; k < batch.size(); ++k) {
                        const auto s = batch[k].state.as_array();
                        const auto n = batch[k].next.as_array();
                        std::copy(s.begin(), s.end(), batch_x.row(k));
                        std::copy(n.begin(), n.end(), batch_nx.row(k));
                    }
                    const num::Matrix q_online = qnet_forward(batch_x, online, &cache);
                    const num::Matrix q_next = qnet_forward(batch_nx, target);

                    num::Vec ys(batch.size()), qs(batch.size());
                    for (std::size_t k = 0; k < batch.size(); ++k) {
                        ys[k] = bellman_target(batch[k].reward, cfg.gamma,
                                               {q_next.row(k), kActions}, batch[k].terminal);
                        qs[k] = q_online.at(k, batch[k].action);
                    }
                    const double loss = rmsle_loss(ys, qs);
                    if (!std::isfinite(loss))
                        throw NumericError("loss diverged at episode " + std::to_string(episode) +
                                               ", step " + std::to_string(t),
                                           "train_agent");
                    const num::Vec dq = rmsle_grad(ys, qs);

                    num::Matrix dout(batch.size(), kActions, 0.0);
                    for (std::size_t k = 0; k < batch.size(); ++k)
                        dout.at(k, batch[k].action) = dq[k];

                    QNetGrads grads = zero_grads_like(online);
                    qnet_backward(online, cache, dout, grads);
                    std::size_t pi = 0;
                    for_each_tensor(grads, [&](const std::string&, std::span<double> g) {
                        num::sgd_step(params[pi++], g, cfg.lr);
                    });

                    if (++sgd_steps % cfg.target_sync == 0) target = online;
                }

                if (sr.terminal) break;
            }

            curve.episodes.push_back({eps, steps ? reward_sum / double(steps) : 0.0});
        }
        result.curves.push_back(std::move(curve));
    }

    result.net = std::move(online);
    return result;
}

AllocationResult greedy_allocate(const QNet& net, AllocationEnv& env, double gamma) {
    AllocationResult out;
    out.state = env.state_name();
    RlState state = env.reset();
    num::Vec rewards;
    double cum_cost = 0.0;

    for (std::size_t day = 0; day < env.horizon(); ++day) {
        const num::Vec q = qnet_forward_one(state.as_array(), net);
        std::size_t best = 0;
        for (std::size_t i = 1; i < q.size(); ++i)
            if (q[i] > q[best]) best = i;

        const double demand = env.demand_on(day);
        const auto allocated =
            static_cast<std::int64_t>(std::llround(kAllocationLevels[best] * demand));
        StepResult sr = env.step(best);
        cum_cost += env.unit_cost() * kAllocationLevels[best] * demand;

        out.days.push_back({day, demand, allocated, sr.reward, cum_cost});
        out.total_doses += allocated;
        out.total_reward += sr.reward;
        rewards.push_back(sr.reward);
        state = sr.next;
        if (sr.terminal) break;
    }
    out.discounted = discounted_return(rewards, gamma);
    return out;
}

void write_reward_curves_csv(const std::string& path, const std::vector<StateCurve>& curves) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    out << "state,episode,epsilon,avg_reward,scaled_avg_reward\n";
    for (const auto& curve : curves)
        for (std::size_t e = 0; e < curve.episodes.size(); ++e)
            out << curve.state << ',' << e << ',' << fmt_double(curve.episodes[e].epsilon) << ','
                << fmt_double(curve.episodes[e].avg_reward) << ',' << fmt_double(curve.scaled(e))
                << '\n';
}

void write_allocations_csv(const std::string& path,
                           const std::vector<AllocationResult>& allocations) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    out << "state,day,predicted_demand,allocated_doses,step_reward,cum_cost\n";
    for (const auto& a : allocations)
        for (const auto& d : a.days)
            out << a.state << ',' << d.day << ',' << fmt_double(d.predicted_demand) << ','
                << d.allocated << ',' << fmt_double(d.reward) << ',' << fmt_double(d.cum_cost)
                << '\n';
}

} // namespace vaxalloc::rl
