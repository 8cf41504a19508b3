#include "mobility/team.hpp"

#include <algorithm>
#include <cmath>

namespace mobility::coordination {

namespace {

constexpr double kDistributionTolerance = 1e-12;

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

}  // namespace

void Distribution::validate(const std::string& what) const {
    if (probabilities.empty()) fail(what + ": distribution must be non-empty");
    double total = 0.0;
    for (double p : probabilities) {
        if (p < 0.0) fail(what + ": probabilities must be >= 0");
        total += p;
    }
    if (std::abs(total - 1.0) > kDistributionTolerance)
        fail(what + ": probabilities must sum to 1 within 1e-12");
}

int TeamModel::joint_action_count() const {
    int count = 1;
    for (const auto& m : members) count *= m.action_count();
    return count;
}

int TeamModel::joint_action_index(const std::vector<int>& actions) const {
    if (actions.size() != members.size())
        fail("joint decision must list one action per member");
    int index = 0;
    for (std::size_t k = 0; k < members.size(); ++k) {
        const int a = actions[k];
        if (a < 0 || a >= members[k].action_count())
            fail("action index out of range for member " + members[k].name);
        index = index * members[k].action_count() + a;
    }
    return index;
}

std::vector<int> TeamModel::decode_joint_action(int joint) const {
    std::vector<int> actions(members.size(), 0);
    for (int k = static_cast<int>(members.size()) - 1; k >= 0; --k) {
        const int n = members[k].action_count();
        actions[k] = joint % n;
        joint /= n;
    }
    return actions;
}

bool TeamModel::uniform_delay() const {
    for (const auto& m : members)
        if (m.delay != members.front().delay) return false;
    return true;
}

int TeamModel::delay() const {
    if (!uniform_delay()) fail("this operation requires a uniform sharing delay");
    return members.front().delay;
}

double TeamModel::transition_probability(int state, int joint_action, int next_state) const {
    double p = 0.0;
    const auto& row = dynamics[state][joint_action];
    for (int w = 0; w < disturbance.size(); ++w)
        if (row[w] == next_state) p += disturbance.probabilities[w];
    return p;
}

double TeamModel::observation_probability(int member, int state, int observation) const {
    const auto& spec = members[member];
    double p = 0.0;
    for (int v = 0; v < spec.noise.size(); ++v)
        if (spec.observation_table[state][v] == observation)
            p += spec.noise.probabilities[v];
    return p;
}

bool TeamModel::is_collision_state(int state) const {
    const std::string& name = states[state];
    return std::find(collision_states.begin(), collision_states.end(), name) !=
           collision_states.end();
}

void TeamModel::validate() const {
    if (states.empty()) fail("team model declares no states");
    if (horizon < 1) fail("team model horizon must be >= 1");
    if (members.empty()) fail("team model declares no members");

    initial.validate("initial distribution");
    if (initial.size() != state_count())
        fail("initial distribution must cover every state");
    disturbance.validate("disturbance");

    for (const auto& m : members) {
        if (m.actions.empty()) fail("member " + m.name + ": no decisions declared");
        if (m.observations.empty()) fail("member " + m.name + ": no observations declared");
        m.noise.validate("member " + m.name + " observation noise");
        if (static_cast<int>(m.observation_table.size()) != state_count())
            fail("member " + m.name + ": observation table must cover every state");
        for (const auto& row : m.observation_table) {
            if (static_cast<int>(row.size()) != m.noise.size())
                fail("member " + m.name + ": observation table must cover every noise value");
            for (int y : row)
                if (y < 0 || y >= m.observation_count())
                    fail("member " + m.name + ": observation index out of range");
        }
        if (m.delay < 0) fail("member " + m.name + ": delay must be >= 0");
        if (m.delay >= horizon)
            fail("member " + m.name + ": delay must be smaller than the horizon");
    }

    const int joint = joint_action_count();
    if (static_cast<int>(dynamics.size()) != state_count())
        fail("dynamics table must cover every state");
    if (static_cast<int>(cost.size()) != state_count())
        fail("cost table must cover every state");
    for (int x = 0; x < state_count(); ++x) {
        if (static_cast<int>(dynamics[x].size()) != joint)
            fail("dynamics table must cover every joint decision");
        if (static_cast<int>(cost[x].size()) != joint)
            fail("cost table must cover every joint decision");
        for (const auto& row : dynamics[x]) {
            if (static_cast<int>(row.size()) != disturbance.size())
                fail("dynamics table must cover every disturbance value");
            for (int next : row)
                if (next < 0 || next >= state_count())
                    fail("dynamics table maps to an undeclared state");
        }
    }

    for (const auto& name : collision_states)
        if (std::find(states.begin(), states.end(), name) == states.end())
            fail("collision state '" + name + "' is not a declared state");
}

std::pair<int, double> step(const TeamModel& model, int state,
                            const std::vector<int>& decisions, Rng& rng) {
    if (state < 0 || state >= model.state_count())
        fail("step: state index out of range");
    const int joint = model.joint_action_index(decisions);
    const int w = rng.sample(model.disturbance.probabilities);
    return {model.dynamics[state][joint][w], model.cost[state][joint]};
}

int observe(const TeamModel& model, int state, int member, Rng& rng) {
    if (state < 0 || state >= model.state_count())
        fail("observe: state index out of range");
    if (member < 0 || member >= model.member_count())
        fail("observe: member index out of range");
    const auto& spec = model.members[member];
    const int v = rng.sample(spec.noise.probabilities);
    return spec.observation_table[state][v];
}

}  // namespace mobility::coordination
