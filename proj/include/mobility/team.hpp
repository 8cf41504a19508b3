#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mobility/errors.hpp"
#include "mobility/rng.hpp"

namespace mobility::coordination {

/// A finite probability vector over implicit indices 0..size-1.
struct Distribution {
    std::vector<double> probabilities;

    int size() const { return static_cast<int>(probabilities.size()); }
    void validate(const std::string& what) const;
};

/// One team member: its decision set, its observation channel (a
/// deterministic table driven by a private noise variable) and its sharing
/// delay. Connected members usually observe noiselessly; human-driven
/// members get the noisy channel.
struct MemberSpec {
    std::string name;
    std::vector<std::string> actions;
    std::vector<std::string> observations;
    Distribution noise;                              // over noise values
    std::vector<std::vector<int>> observation_table; // [state][noise] -> observation
    int delay = 1;

    int action_count() const { return static_cast<int>(actions.size()); }
    int observation_count() const { return static_cast<int>(observations.size()); }
};

/// Finite decentralized team with delayed information sharing: states,
/// per-member decisions and observations, disturbance-driven dynamics,
/// per-step cost and an initial state distribution. Joint decisions are
/// indexed row-major with the LAST member fastest.
struct TeamModel {
    std::vector<std::string> states;
    int horizon = 0;  // decision epochs 0..horizon-1
    std::vector<MemberSpec> members;
    Distribution disturbance;
    std::vector<std::vector<std::vector<int>>> dynamics;  // [state][joint][w] -> state
    std::vector<std::vector<double>> cost;                // [state][joint]
    Distribution initial;                                 // over states
    std::vector<std::string> collision_states;            // optional episode flag

    int state_count() const { return static_cast<int>(states.size()); }
    int member_count() const { return static_cast<int>(members.size()); }
    int joint_action_count() const;
    int joint_action_index(const std::vector<int>& actions) const;
    std::vector<int> decode_joint_action(int joint) const;

    bool uniform_delay() const;
    int delay() const;  // requires uniform_delay()

    /// Marginal transition kernel with the disturbance summed out.
    double transition_probability(int state, int joint_action, int next_state) const;
    /// Marginal observation kernel of one member with its noise summed out.
    double observation_probability(int member, int state, int observation) const;

    bool is_collision_state(int state) const;

    /// Checks table totality, index ranges, distribution normalization
    /// (tolerance 1e-12) and delay < horizon. Throws ValidationError.
    void validate() const;
};

/// Samples the disturbance and advances one step; returns the successor
/// state and the stage cost of (state, joint decision). Deterministic given
/// the rng state.
std::pair<int, double> step(const TeamModel& model, int state,
                            const std::vector<int>& decisions, Rng& rng);

/// Samples the member's observation noise and returns its observation of
/// the state.
int observe(const TeamModel& model, int state, int member, Rng& rng);

}  // namespace mobility::coordination
