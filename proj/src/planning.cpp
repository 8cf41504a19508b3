#include "mobility/planning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace mobility::coordination {

namespace {

// Hidden tuple tracked by the common-information solver at one decision
// point: the current state, every member's recent private observation
// window, and the joint decisions made but not yet shared.
struct Particle {
    int x = 0;
    std::vector<std::vector<int>> windows;  // per member, oldest first
    std::vector<std::vector<int>> pending;  // joint profiles, oldest first

    bool operator<(const Particle& other) const {
        if (x != other.x) return x < other.x;
        if (windows != other.windows) return windows < other.windows;
        return pending < other.pending;
    }
};

using Belief = std::map<Particle, double>;
using ZKey = std::vector<int>;

int window_drop(int stage, int delay) {
    // The member window keeps decisions from stage-delay+1 on; the pending
    // list starts one step earlier once sharing has warmed up.
    return (delay >= 1 && stage >= delay) ? 1 : 0;
}

LambdaKey lambda_of(const Particle& p, int member, int drop) {
    LambdaKey key = p.windows[member];
    for (std::size_t j = static_cast<std::size_t>(drop); j < p.pending.size(); ++j)
        key.push_back(p.pending[j][member]);
    return key;
}

struct Branch {
    double probability = 0.0;
    Belief belief;  // normalized
};

struct Expansion {
    double stage_cost = 0.0;
    std::map<ZKey, Branch> children;
};

class PlanSolver {
public:
    PlanSolver(const TeamModel& model, const PlanningLimits& limits)
        : model_(model), limits_(limits), delay_(model.delay()) {}

    const TeamModel& model() const { return model_; }
    int delay() const { return delay_; }

    /// Root branches: the initial observation round, which already emits a
    /// shared batch when the delay is zero.
    std::map<ZKey, Branch> bootstrap() const {
        std::map<ZKey, Belief> raw;
        for (int x = 0; x < model_.state_count(); ++x) {
            const double w = model_.initial.probabilities[x];
            if (w == 0.0) continue;
            Particle base;
            base.x = x;
            base.windows.assign(model_.member_count(), {});
            expand_observations(w, base, std::nullopt, raw);
        }
        return normalize(raw);
    }

    Expansion advance(int stage, const Belief& belief,
                      const PrescriptionProfile& profile) const {
        Expansion out;
        const int drop = window_drop(stage, delay_);
        std::map<ZKey, Belief> raw;
        for (const auto& [particle, weight] : belief) {
            std::vector<int> actions(model_.member_count());
            for (int k = 0; k < model_.member_count(); ++k)
                actions[k] = profile.members[k].action_for(lambda_of(particle, k, drop));
            const int joint = model_.joint_action_index(actions);
            out.stage_cost += weight * model_.cost[particle.x][joint];

            Particle next = particle;
            next.pending.push_back(actions);
            std::optional<std::vector<int>> decision_out;
            if (static_cast<int>(next.pending.size()) > delay_) {
                decision_out = next.pending.front();
                next.pending.erase(next.pending.begin());
            }

            for (int w = 0; w < model_.disturbance.size(); ++w) {
                const double pw = model_.disturbance.probabilities[w];
                if (pw == 0.0) continue;
                Particle moved = next;
                moved.x = model_.dynamics[particle.x][joint][w];
                expand_observations(weight * pw, moved, decision_out, raw);
            }
        }
        out.children = normalize(raw);
        return out;
    }

    double value(int stage, const Belief& belief) {
        if (stage >= model_.horizon) return 0.0;
        const std::string key = fingerprint(stage, belief);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        double best = 0.0;
        (void)minimize(stage, belief, &best, nullptr);
        if (memo_.size() >= limits_.max_value_entries)
            throw InstanceTooLargeError(
                "planning value table exceeded " +
                std::to_string(limits_.max_value_entries) + " entries");
        memo_[key] = best;
        return best;
    }

    PrescriptionProfile best_profile(int stage, const Belief& belief) {
        double best = 0.0;
        PrescriptionProfile argmin;
        minimize(stage, belief, &best, &argmin);
        return argmin;
    }

private:
    /// Enumerates every prescription profile over the support of the
    /// members' private windows, in lexicographic order, and returns the
    /// minimal expected cost to go (optionally the first minimizer).
    double minimize(int stage, const Belief& belief, double* best_value,
                    PrescriptionProfile* best_profile) {
        const int drop = window_drop(stage, delay_);
        std::vector<std::set<LambdaKey>> support(model_.member_count());
        for (const auto& [particle, weight] : belief) {
            if (weight == 0.0) continue;
            for (int k = 0; k < model_.member_count(); ++k)
                support[k].insert(lambda_of(particle, k, drop));
        }

        std::vector<std::vector<LambdaKey>> keys(model_.member_count());
        double profile_count = 1.0;
        for (int k = 0; k < model_.member_count(); ++k) {
            keys[k].assign(support[k].begin(), support[k].end());
            for (std::size_t i = 0; i < keys[k].size(); ++i)
                profile_count *= static_cast<double>(model_.members[k].action_count());
        }
        if (profile_count > limits_.max_profiles_per_node)
            throw InstanceTooLargeError(
                "prescription enumeration needs " + std::to_string(profile_count) +
                " profiles at one stage node (limit " +
                std::to_string(limits_.max_profiles_per_node) + ")");

        // Flattened odometer over (member, window) action digits; the last
        // digit moves fastest, so profiles appear in lexicographic order.
        std::vector<std::pair<int, int>> slots;  // (member, window index)
        for (int k = 0; k < model_.member_count(); ++k)
            for (std::size_t i = 0; i < keys[k].size(); ++i)
                slots.push_back({k, static_cast<int>(i)});
        std::vector<int> digits(slots.size(), 0);

        bool found = false;
        double best = 0.0;
        while (true) {
            PrescriptionProfile profile;
            profile.members.resize(model_.member_count());
            for (std::size_t s = 0; s < slots.size(); ++s) {
                const auto [k, i] = slots[s];
                profile.members[k].rules.push_back({keys[k][i], digits[s]});
            }

            const Expansion expansion = advance(stage, belief, profile);
            double total = expansion.stage_cost;
            for (const auto& [z, branch] : expansion.children)
                total += branch.probability * value(stage + 1, branch.belief);

            if (!found || total < best) {
                found = true;
                best = total;
                if (best_profile) *best_profile = profile;
            }

            int pos = static_cast<int>(slots.size()) - 1;
            while (pos >= 0 && digits[pos] ==
                                   model_.members[slots[pos].first].action_count() - 1) {
                digits[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
            ++digits[pos];
        }
        *best_value = best;
        return best;
    }

    /// Generates the members' observations of `moved.x`, appends them to
    /// the private windows and emits whatever the sharing protocol releases
    /// (the oldest window entries once the windows are full, married with
    /// the oldest pending decision profile when one was released).
    void expand_observations(double weight, const Particle& moved,
                             const std::optional<std::vector<int>>& decision_out,
                             std::map<ZKey, Belief>& out) const {
        const int K = model_.member_count();
        std::vector<int> noise(K, 0);
        while (true) {
            double p = weight;
            for (int k = 0; k < K; ++k) p *= model_.members[k].noise.probabilities[noise[k]];
            if (p > 0.0) {
                Particle next = moved;
                std::vector<int> obs_out;
                bool popped = false;
                for (int k = 0; k < K; ++k) {
                    next.windows[k].push_back(
                        model_.members[k].observation_table[moved.x][noise[k]]);
                    if (static_cast<int>(next.windows[k].size()) > delay_) {
                        obs_out.push_back(next.windows[k].front());
                        next.windows[k].erase(next.windows[k].begin());
                        popped = true;
                    }
                }
                ZKey z;
                if (popped) {
                    z = obs_out;
                    if (decision_out)
                        z.insert(z.end(), decision_out->begin(), decision_out->end());
                }
                out[z][next] += p;
            }
            int pos = K - 1;
            while (pos >= 0 && noise[pos] == model_.members[pos].noise.size() - 1) {
                noise[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
            ++noise[pos];
        }
    }

    std::map<ZKey, Branch> normalize(const std::map<ZKey, Belief>& raw) const {
        std::map<ZKey, Branch> out;
        for (const auto& [z, belief] : raw) {
            Branch branch;
            for (const auto& [particle, w] : belief) branch.probability += w;
            for (const auto& [particle, w] : belief)
                branch.belief[particle] = w / branch.probability;
            out[z] = std::move(branch);
        }
        return out;
    }

    std::string fingerprint(int stage, const Belief& belief) const {
        std::ostringstream key;
        key << stage << '|';
        char buf[32];
        for (const auto& [particle, weight] : belief) {
            key << particle.x << ',';
            for (const auto& w : particle.windows) {
                for (int y : w) key << y << '.';
                key << '/';
            }
            for (const auto& u : particle.pending) {
                for (int a : u) key << a << '.';
                key << '/';
            }
            std::snprintf(buf, sizeof buf, "%.12e;", weight);
            key << buf;
        }
        return key.str();
    }

    const TeamModel& model_;
    PlanningLimits limits_;
    int delay_ = 0;
    std::map<std::string, double> memo_;
};

InformationState advance_info_state(const TeamModel& model, const InformationState& pi,
                                    const ZKey& z, int arrival_stage) {
    if (arrival_stage < model.delay()) return pi;  // nothing shared yet
    const int K = model.member_count();
    SharedBatch batch;
    batch.observations.assign(z.begin(), z.begin() + K);
    if (arrival_stage >= model.delay() + 1)
        batch.decisions.assign(z.begin() + K, z.begin() + 2 * K);
    return update_information_state(pi, batch, model);
}

struct TreeBuilder {
    PlanSolver& solver;
    PlanningStrategy& strategy;

    int build(int stage, const Belief& belief, const InformationState& pi) {
        const int id = static_cast<int>(strategy.nodes.size());
        strategy.nodes.emplace_back();

        const double node_value = solver.value(stage, belief);
        PrescriptionProfile best = solver.best_profile(stage, belief);
        record_policy(stage, pi, best);

        std::map<std::vector<int>, int> children;
        if (stage + 1 < solver.model().horizon) {
            const Expansion expansion = solver.advance(stage, belief, best);
            for (const auto& [z, branch] : expansion.children) {
                const InformationState child_pi =
                    advance_info_state(solver.model(), pi, z, stage + 1);
                children[z] = build(stage + 1, branch.belief, child_pi);
            }
        }

        PlanNode& node = strategy.nodes[id];
        node.stage = stage;
        node.info_state = pi;
        node.value = node_value;
        node.prescriptions = std::move(best);
        node.children = std::move(children);
        return id;
    }

    void record_policy(int stage, const InformationState& pi,
                       const PrescriptionProfile& profile) {
        for (const auto& entry : strategy.stage_policies[stage]) {
            if (entry.info_state == pi) {
                if (!(entry.prescriptions == profile))
                    log_line("stage " + std::to_string(stage) +
                             ": two common histories reached the same information state "
                             "with different prescriptions; keeping the first");
                return;
            }
        }
        strategy.stage_policies[stage].push_back({pi, profile});
    }
};

/// Belief over hidden tuples induced by an arbitrary delayed-state belief:
/// the anchor state is drawn from `pi`, the pending decisions are fixed to
/// each member's first action and the private windows are rolled forward
/// through the model. Linear in `pi` by construction.
Belief lift_information_state(const TeamModel& model, int stage,
                              const InformationState& pi) {
    const int n = model.delay();
    const int K = model.member_count();
    const int steps = std::min(n, stage);
    const bool observe_anchor = stage < n;

    std::vector<std::vector<int>> pending(
        static_cast<std::size_t>(steps), std::vector<int>(static_cast<std::size_t>(K), 0));

    struct Item {
        int x;
        std::vector<std::vector<int>> windows;
        double weight;
    };
    std::vector<Item> frontier;
    for (int x = 0; x < model.state_count(); ++x)
        if (pi.probabilities[x] > 0.0)
            frontier.push_back({x, std::vector<std::vector<int>>(K), pi.probabilities[x]});

    auto expand_obs = [&](std::vector<Item>& items) {
        std::vector<Item> out;
        for (const auto& item : items) {
            std::vector<int> noise(K, 0);
            while (true) {
                double p = item.weight;
                for (int k = 0; k < K; ++k)
                    p *= model.members[k].noise.probabilities[noise[k]];
                if (p > 0.0) {
                    Item next = item;
                    next.weight = p;
                    for (int k = 0; k < K; ++k)
                        next.windows[k].push_back(
                            model.members[k].observation_table[item.x][noise[k]]);
                    out.push_back(std::move(next));
                }
                int pos = K - 1;
                while (pos >= 0 && noise[pos] == model.members[pos].noise.size() - 1) {
                    noise[pos] = 0;
                    --pos;
                }
                if (pos < 0) break;
                ++noise[pos];
            }
        }
        items = std::move(out);
    };

    if (observe_anchor) expand_obs(frontier);
    for (int s = 0; s < steps; ++s) {
        const int joint = model.joint_action_index(pending[static_cast<std::size_t>(s)]);
        std::vector<Item> moved;
        for (const auto& item : frontier) {
            for (int w = 0; w < model.disturbance.size(); ++w) {
                const double pw = model.disturbance.probabilities[w];
                if (pw == 0.0) continue;
                Item next = item;
                next.weight *= pw;
                next.x = model.dynamics[item.x][joint][w];
                moved.push_back(std::move(next));
            }
        }
        frontier = std::move(moved);
        expand_obs(frontier);
    }

    Belief belief;
    for (const auto& item : frontier) {
        Particle p;
        p.x = item.x;
        p.windows = item.windows;
        p.pending = pending;
        belief[p] += item.weight;
    }
    return belief;
}

}  // namespace

int MemberPrescription::action_for(const LambdaKey& window) const {
    auto it = std::lower_bound(rules.begin(), rules.end(), window,
                               [](const auto& rule, const LambdaKey& key) {
                                   return rule.first < key;
                               });
    if (it == rules.end() || it->first != window)
        throw ProtocolError(
            "a member observed a private window the plan considers impossible");
    return it->second;
}

bool MemberPrescription::constant() const {
    for (const auto& [key, action] : rules)
        if (action != rules.front().second) return false;
    return true;
}

std::vector<int> batch_key(const std::optional<SharedBatch>& batch) {
    if (!batch) return {};
    std::vector<int> key = batch->observations;
    key.insert(key.end(), batch->decisions.begin(), batch->decisions.end());
    return key;
}

int PlanningStrategy::root_for(const std::vector<int>& first_batch_key) const {
    auto it = roots.find(first_batch_key);
    if (it == roots.end())
        throw ProtocolError("the first shared batch does not match any planned root");
    return it->second;
}

const PrescriptionProfile* PlanningStrategy::prescriptions_for(
    int stage, const InformationState& pi) const {
    if (stage < 0 || stage >= static_cast<int>(stage_policies.size())) return nullptr;
    for (const auto& entry : stage_policies[stage])
        if (entry.info_state == pi) return &entry.prescriptions;
    return nullptr;
}

PlanningStrategy solve_planning(const TeamModel& model, const PlanningLimits& limits) {
    model.validate();
    if (!model.uniform_delay())
        throw ValidationError(
            "planning requires a uniform sharing delay; asymmetric delays are "
            "supported by the sharing protocol only");

    PlanningStrategy strategy;
    strategy.model = model;
    strategy.stage_policies.resize(static_cast<std::size_t>(model.horizon));

    PlanSolver solver(strategy.model, limits);
    TreeBuilder builder{solver, strategy};

    const InformationState prior = initial_information_state(model);
    for (const auto& [z, branch] : solver.bootstrap()) {
        const InformationState pi = advance_info_state(strategy.model, prior, z, 0);
        const int root = builder.build(0, branch.belief, pi);
        strategy.roots[z] = root;
        strategy.value += branch.probability * strategy.nodes[root].value;
    }
    return strategy;
}

double stage_value(const TeamModel& model, int stage, const InformationState& pi,
                   const PlanningLimits& limits) {
    model.validate();
    if (stage < 0 || stage >= model.horizon)
        throw ValidationError("stage_value: stage must lie in [0, horizon)");
    if (pi.size() != model.state_count())
        throw ValidationError("stage_value: belief size does not match the model");
    pi.validate();

    PlanSolver solver(model, limits);
    const Belief belief = lift_information_state(model, stage, pi);
    return solver.value(stage, belief);
}

}  // namespace mobility::coordination
