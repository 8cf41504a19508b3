#include "mobility/intersection.hpp"

#include <string>

namespace mobility::coordination {

namespace {

constexpr int kGo = 1;  // action 0 is wait

}  // namespace

int intersection_state(const IntersectionParams& params, int position1, int position2) {
    const int positions = params.cells + 1;
    return position1 * positions + position2;
}

TeamModel build_intersection_scenario(const IntersectionParams& params) {
    if (params.cells < 2)
        throw ValidationError("intersection needs at least 2 cells per approach");
    if (params.noise < 0.0 || params.noise >= 1.0)
        throw ValidationError("observation noise must lie in [0, 1)");

    const int horizon = params.horizon > 0 ? params.horizon : 2 * params.cells;
    const double penalty = params.collision_penalty > 0.0
                               ? params.collision_penalty
                               : 1000.0 * static_cast<double>(horizon);
    if (params.delay < 0 || params.delay >= horizon)
        throw ValidationError("sharing delay must lie in [0, horizon)");

    const int goal = params.cells;
    const int merge = params.cells - 1;
    const int positions = params.cells + 1;
    const int crashed = positions * positions;

    TeamModel model;
    model.horizon = horizon;
    for (int p1 = 0; p1 < positions; ++p1)
        for (int p2 = 0; p2 < positions; ++p2)
            model.states.push_back("p1=" + std::to_string(p1) + ",p2=" + std::to_string(p2));
    model.states.push_back("crashed");
    model.collision_states = {"crashed"};

    for (int k = 0; k < 2; ++k) {
        MemberSpec member;
        member.name = k == 0 ? "cav" : "hdv";
        member.delay = params.delay;
        member.actions = {"wait", "go"};
        for (int p = 0; p < positions; ++p)
            member.observations.push_back("pos" + std::to_string(p));

        const bool noisy = k == 1 && params.noise > 0.0;
        if (noisy)
            member.noise.probabilities = {1.0 - params.noise, params.noise};
        else
            member.noise.probabilities = {1.0};

        member.observation_table.resize(model.states.size());
        for (int x = 0; x < static_cast<int>(model.states.size()); ++x) {
            const bool is_crashed = x == crashed;
            const int own = is_crashed ? merge : (k == 0 ? x / positions : x % positions);
            member.observation_table[x].push_back(own);
            if (noisy) member.observation_table[x].push_back(std::min(own + 1, goal));
        }
        model.members.push_back(std::move(member));
    }

    model.disturbance.probabilities = {1.0};

    const int joint_count = 4;
    model.dynamics.resize(model.states.size());
    model.cost.resize(model.states.size());
    for (int x = 0; x < static_cast<int>(model.states.size()); ++x) {
        model.dynamics[x].resize(joint_count);
        model.cost[x].resize(joint_count);
        for (int joint = 0; joint < joint_count; ++joint) {
            const int u1 = joint / 2;
            const int u2 = joint % 2;
            if (x == crashed) {
                model.dynamics[x][joint] = {crashed};
                model.cost[x][joint] = penalty;
                continue;
            }
            const int p1 = x / positions;
            const int p2 = x % positions;
            const int next1 = std::min(p1 + (u1 == kGo ? 1 : 0), goal);
            const int next2 = std::min(p2 + (u2 == kGo ? 1 : 0), goal);
            const bool crash = next1 == merge && next2 == merge;
            model.dynamics[x][joint] = {
                crash ? crashed : next1 * positions + next2};
            model.cost[x][joint] =
                crash ? penalty
                      : static_cast<double>((p1 != goal ? 1 : 0) + (p2 != goal ? 1 : 0));
        }
    }

    model.initial.probabilities.assign(model.states.size(), 0.0);
    model.initial.probabilities[static_cast<std::size_t>(intersection_state(params, 0, 0))] = 1.0;

    model.validate();
    return model;
}

}  // namespace mobility::coordination
