#pragma once

// Independent reference computations for the delayed-sharing team: an exact
// posterior by trajectory enumeration, an exhaustive decentralized-policy
// search over full raw histories, an open-loop enumeration and a textbook
// finite-horizon POMDP recursion. None of these share code with the
// library's filter or planner.

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

#include "mobility/team.hpp"

namespace mobility::testing {

using coordination::TeamModel;

/// Exact P(X_anchor | shared data) by enumerating every state trajectory
/// consistent with the realized profiles. The shared data at time t under
/// delay n is observations y_0..y_{t-n} and decisions u_0..u_{t-n-1}; the
/// caller passes those directly: `observations` has anchor+1 entries and
/// `decisions` has anchor entries, and the posterior is over X_{anchor}.
inline std::vector<double> posterior_by_enumeration(
    const TeamModel& model, const std::vector<std::vector<int>>& observations,
    const std::vector<std::vector<int>>& decisions) {
    const int anchor = static_cast<int>(observations.size()) - 1;
    std::vector<double> posterior(model.state_count(), 0.0);
    double total = 0.0;

    std::vector<int> path(static_cast<std::size_t>(anchor) + 1, 0);
    // Odometer over all state trajectories x_0..x_anchor.
    while (true) {
        double weight = model.initial.probabilities[path[0]];
        for (int s = 0; weight > 0.0 && s <= anchor; ++s) {
            for (int k = 0; k < model.member_count(); ++k)
                weight *= model.observation_probability(k, path[s], observations[s][k]);
            if (s < anchor) {
                const int joint = model.joint_action_index(decisions[s]);
                weight *= model.transition_probability(path[s], joint, path[s + 1]);
            }
        }
        posterior[path[static_cast<std::size_t>(anchor)]] += weight;
        total += weight;

        int pos = anchor;
        while (pos >= 0 && path[static_cast<std::size_t>(pos)] == model.state_count() - 1) {
            path[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++path[static_cast<std::size_t>(pos)];
    }

    for (double& p : posterior) p /= total;
    return posterior;
}

namespace detail {

// One complete system configuration with its full raw histories; the
// policy search derives common and private views from these directly.
struct Config {
    int x = 0;
    std::vector<std::vector<int>> obs_history;  // [time][member]
    std::vector<std::vector<int>> dec_history;  // [time][member]
    double weight = 0.0;
};

inline std::vector<int> common_view(const Config& c, int t, int delay) {
    std::vector<int> key;
    for (int s = 0; s <= t - delay; ++s)
        for (int y : c.obs_history[static_cast<std::size_t>(s)]) key.push_back(y);
    key.push_back(-1);
    for (int s = 0; s <= t - delay - 1; ++s)
        for (int u : c.dec_history[static_cast<std::size_t>(s)]) key.push_back(u);
    return key;
}

inline std::vector<int> private_view(const Config& c, int t, int delay, int member) {
    std::vector<int> key;
    for (int s = std::max(0, t - delay + 1); s <= t; ++s)
        key.push_back(c.obs_history[static_cast<std::size_t>(s)][static_cast<std::size_t>(member)]);
    key.push_back(-1);
    for (int s = std::max(0, t - delay + 1); s <= t - 1; ++s)
        key.push_back(c.dec_history[static_cast<std::size_t>(s)][static_cast<std::size_t>(member)]);
    return key;
}

// Minimal expected remaining cost for one group of configurations sharing
// a common view, enumerating every assignment of actions to the reachable
// (member, private view) pairs. Weights stay unnormalized throughout.
inline double policy_search(const TeamModel& model, int t,
                            const std::vector<Config>& configs) {
    if (t == model.horizon) return 0.0;
    const int delay = model.delay();
    const int K = model.member_count();

    std::vector<std::vector<std::vector<int>>> views(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        for (const auto& c : configs) {
            auto v = private_view(c, t, delay, k);
            auto& list = views[static_cast<std::size_t>(k)];
            if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
        }
        std::sort(views[static_cast<std::size_t>(k)].begin(),
                  views[static_cast<std::size_t>(k)].end());
    }

    std::vector<std::pair<int, int>> slots;
    for (int k = 0; k < K; ++k)
        for (std::size_t i = 0; i < views[static_cast<std::size_t>(k)].size(); ++i)
            slots.push_back({k, static_cast<int>(i)});
    std::vector<int> choice(slots.size(), 0);

    double best = std::numeric_limits<double>::infinity();
    while (true) {
        auto action_of = [&](const Config& c, int k) {
            const auto v = private_view(c, t, delay, k);
            for (std::size_t s = 0; s < slots.size(); ++s)
                if (slots[s].first == k &&
                    views[static_cast<std::size_t>(k)][static_cast<std::size_t>(slots[s].second)] == v)
                    return choice[s];
            throw Error("policy oracle: unreachable private view");
        };

        double stage = 0.0;
        std::vector<Config> advanced;
        for (const auto& c : configs) {
            std::vector<int> actions(static_cast<std::size_t>(K));
            for (int k = 0; k < K; ++k) actions[static_cast<std::size_t>(k)] = action_of(c, k);
            const int joint = model.joint_action_index(actions);
            stage += c.weight * model.cost[c.x][joint];

            for (int w = 0; w < model.disturbance.size(); ++w) {
                const double pw = model.disturbance.probabilities[w];
                if (pw == 0.0) continue;
                const int x2 = model.dynamics[c.x][joint][w];
                // enumerate the joint observation noises at t+1
                std::vector<int> noise(static_cast<std::size_t>(K), 0);
                while (true) {
                    double pv = 1.0;
                    for (int k = 0; k < K; ++k)
                        pv *= model.members[static_cast<std::size_t>(k)]
                                  .noise.probabilities[noise[static_cast<std::size_t>(k)]];
                    if (pv > 0.0) {
                        Config next = c;
                        next.x = x2;
                        next.weight = c.weight * pw * pv;
                        next.dec_history.push_back(actions);
                        std::vector<int> obs(static_cast<std::size_t>(K));
                        for (int k = 0; k < K; ++k)
                            obs[static_cast<std::size_t>(k)] =
                                model.members[static_cast<std::size_t>(k)]
                                    .observation_table[x2][noise[static_cast<std::size_t>(k)]];
                        next.obs_history.push_back(obs);
                        advanced.push_back(std::move(next));
                    }
                    int pos = K - 1;
                    while (pos >= 0 &&
                           noise[static_cast<std::size_t>(pos)] ==
                               model.members[static_cast<std::size_t>(pos)].noise.size() - 1) {
                        noise[static_cast<std::size_t>(pos)] = 0;
                        --pos;
                    }
                    if (pos < 0) break;
                    ++noise[static_cast<std::size_t>(pos)];
                }
            }
        }

        double continuation = 0.0;
        if (t + 1 < model.horizon) {
            std::map<std::vector<int>, std::vector<Config>> groups;
            for (auto& c : advanced)
                groups[common_view(c, t + 1, delay)].push_back(std::move(c));
            for (const auto& [key, group] : groups)
                continuation += policy_search(model, t + 1, group);
        }
        best = std::min(best, stage + continuation);

        int pos = static_cast<int>(slots.size()) - 1;
        while (pos >= 0 &&
               choice[static_cast<std::size_t>(pos)] ==
                   model.members[static_cast<std::size_t>(slots[static_cast<std::size_t>(pos)].first)]
                           .action_count() -
                       1) {
            choice[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++choice[static_cast<std::size_t>(pos)];
    }
    return best;
}

}  // namespace detail

/// Optimal expected total cost over every decentralized policy (decisions
/// as arbitrary functions of the member's common and private data),
/// enumerated exhaustively on reachable information sets.
inline double decentralized_policy_optimum(const TeamModel& model) {
    const int K = model.member_count();
    std::vector<detail::Config> initial;
    for (int x = 0; x < model.state_count(); ++x) {
        const double px = model.initial.probabilities[x];
        if (px == 0.0) continue;
        std::vector<int> noise(static_cast<std::size_t>(K), 0);
        while (true) {
            double pv = 1.0;
            for (int k = 0; k < K; ++k)
                pv *= model.members[static_cast<std::size_t>(k)]
                          .noise.probabilities[noise[static_cast<std::size_t>(k)]];
            if (pv > 0.0) {
                detail::Config c;
                c.x = x;
                c.weight = px * pv;
                std::vector<int> obs(static_cast<std::size_t>(K));
                for (int k = 0; k < K; ++k)
                    obs[static_cast<std::size_t>(k)] =
                        model.members[static_cast<std::size_t>(k)]
                            .observation_table[x][noise[static_cast<std::size_t>(k)]];
                c.obs_history.push_back(obs);
                initial.push_back(std::move(c));
            }
            int pos = K - 1;
            while (pos >= 0 &&
                   noise[static_cast<std::size_t>(pos)] ==
                       model.members[static_cast<std::size_t>(pos)].noise.size() - 1) {
                noise[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
            ++noise[static_cast<std::size_t>(pos)];
        }
    }

    std::map<std::vector<int>, std::vector<detail::Config>> groups;
    for (auto& c : initial)
        groups[detail::common_view(c, 0, model.delay())].push_back(std::move(c));
    double total = 0.0;
    for (const auto& [key, group] : groups)
        total += detail::policy_search(model, 0, group);
    return total;
}

/// Minimal expected total cost over open-loop joint action sequences.
inline double open_loop_optimum(const TeamModel& model) {
    const int joint = model.joint_action_count();
    std::vector<int> plan(static_cast<std::size_t>(model.horizon), 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        // exact expectation over (x0, disturbances)
        std::map<int, double> belief;
        for (int x = 0; x < model.state_count(); ++x)
            if (model.initial.probabilities[x] > 0.0)
                belief[x] = model.initial.probabilities[x];
        double cost = 0.0;
        for (int t = 0; t < model.horizon; ++t) {
            std::map<int, double> next;
            for (const auto& [x, w] : belief) {
                cost += w * model.cost[x][plan[static_cast<std::size_t>(t)]];
                for (int d = 0; d < model.disturbance.size(); ++d) {
                    const double pd = model.disturbance.probabilities[d];
                    if (pd > 0.0)
                        next[model.dynamics[x][plan[static_cast<std::size_t>(t)]][d]] += w * pd;
                }
            }
            belief = std::move(next);
        }
        best = std::min(best, cost);

        int pos = model.horizon - 1;
        while (pos >= 0 && plan[static_cast<std::size_t>(pos)] == joint - 1) {
            plan[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++plan[static_cast<std::size_t>(pos)];
    }
    return best;
}

/// Textbook finite-horizon POMDP backward induction for a single member
/// with instant sharing (delay 0): observe, update the belief, act.
inline double pomdp_backward_induction(const TeamModel& model) {
    struct Solver {
        const TeamModel& model;

        double value(int t, const std::vector<double>& belief) const {
            if (t == model.horizon) return 0.0;
            double best = std::numeric_limits<double>::infinity();
            for (int a = 0; a < model.joint_action_count(); ++a) {
                double stage = 0.0;
                for (int x = 0; x < model.state_count(); ++x)
                    stage += belief[x] * model.cost[x][a];
                // branch on the next observation
                double continuation = 0.0;
                for (int y = 0; y < model.members[0].observation_count(); ++y) {
                    std::vector<double> next(model.state_count(), 0.0);
                    double py = 0.0;
                    for (int x2 = 0; x2 < model.state_count(); ++x2) {
                        double reach = 0.0;
                        for (int x = 0; x < model.state_count(); ++x)
                            reach += belief[x] * model.transition_probability(x, a, x2);
                        next[x2] = reach * model.observation_probability(0, x2, y);
                        py += next[x2];
                    }
                    if (py == 0.0) continue;
                    for (double& p : next) p /= py;
                    continuation += py * value(t + 1, next);
                }
                best = std::min(best, stage + continuation);
            }
            return best;
        }
    };

    Solver solver{model};
    double total = 0.0;
    for (int y = 0; y < model.members[0].observation_count(); ++y) {
        std::vector<double> belief(model.state_count(), 0.0);
        double py = 0.0;
        for (int x = 0; x < model.state_count(); ++x) {
            belief[x] = model.initial.probabilities[x] * model.observation_probability(0, x, y);
            py += belief[x];
        }
        if (py == 0.0) continue;
        for (double& p : belief) p /= py;
        total += py * solver.value(0, belief);
    }
    return total;
}

}  // namespace mobility::testing
