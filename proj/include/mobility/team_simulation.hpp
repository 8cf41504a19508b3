#pragma once

#include <deque>
#include <functional>
#include <optional>

#include "mobility/planning.hpp"

namespace mobility::coordination {

/// Per-member slice of one delivery; entries are absent while that member's
/// own delay still buffers them (delays may be asymmetric).
struct MemberShare {
    std::optional<int> observation;
    std::optional<int> decision;
};

/// Word-of-mouth transport: buffers every member's observations and
/// decisions and releases member k's data with member k's delay. With a
/// uniform delay the releases form the SharedBatch sequence the filter and
/// the plan tree consume.
class DelayedSharingProtocol {
public:
    explicit DelayedSharingProtocol(std::vector<int> delays);

    void record_observations(int t, const std::vector<int>& observations);
    void record_decisions(int t, const std::vector<int>& decisions);

    /// What becomes common knowledge at time t, member by member.
    std::vector<MemberShare> deliver(int t) const;

    /// Uniform-delay batch delivered at time t; nullopt before sharing
    /// begins. Throws ValidationError when delays differ.
    std::optional<SharedBatch> deliver_uniform(int t) const;

private:
    std::vector<int> delays_;
    std::vector<std::vector<int>> observations_;  // [t][member]
    std::vector<std::vector<int>> decisions_;     // [t][member]
};

/// One member's execution-time state machine. Its interface admits only the
/// protocol deliveries and the member's own observation, so a decision can
/// never depend on data outside (common info, private window); the member
/// recomputes the information state on its own and walks the plan tree by
/// matching realized batches, verifying its recomputation against the plan.
class TeamMemberRuntime {
public:
    TeamMemberRuntime(const PlanningStrategy& strategy, int member);

    /// Consumes the time-t delivery (if any) plus the member's own
    /// observation of the current state and returns the member's decision.
    int act(int t, const std::optional<SharedBatch>& batch, int own_observation);

    const InformationState& information_state() const { return pi_; }
    const CommonInfo& common_info() const { return common_; }
    PrivateInfo private_info() const;

    /// Hook point for adapting prescriptions from local data after each
    /// shared update. Unset by default; the planned prescriptions are used
    /// as-is.
    using StrategyUpdateHook = std::function<PrescriptionProfile(
        int stage, const InformationState&, const PrescriptionProfile&)>;
    void set_strategy_update_hook(StrategyUpdateHook hook) { hook_ = std::move(hook); }

private:
    const PlanningStrategy* strategy_;
    int member_;
    int node_ = -1;
    InformationState pi_;
    CommonInfo common_;
    std::deque<int> window_observations_;  // last n own observations
    std::deque<int> window_decisions_;     // last n-1 own decisions
    StrategyUpdateHook hook_;
};

struct TrajectoryStep {
    int t = 0;
    int state = 0;
    std::vector<int> decisions;
    std::vector<int> observations;
    double cost = 0.0;
};

struct EpisodeResult {
    double total_cost = 0.0;
    bool collision = false;
    std::vector<TrajectoryStep> steps;
};

struct SimulationStats {
    double mean_cost = 0.0;
    double standard_error = 0.0;
    long collision_episodes = 0;
    std::vector<EpisodeResult> episodes;
};

/// Runs seeded episodes of the decentralized loop: members observe, the
/// protocol delivers delayed batches, every member independently recomputes
/// the information state and acts from its plan-tree prescription. Episode
/// e draws from derive_seed(seed, e) and statistics aggregate in episode
/// order with a fixed pairwise reduction, so the result is identical for
/// any worker count.
SimulationStats simulate_team(const TeamModel& model, const PlanningStrategy& strategy,
                              int episodes, std::uint64_t seed, int workers = 1);

/// Replays a fixed per-step transcript (observation profiles and decision
/// profiles) through the sharing protocol and the filter, under a given
/// strategy object, and returns the per-step information states. The
/// strategy is carried exactly as the members carry it at execution time;
/// the filter never consults it, which is what this replay makes testable.
std::vector<InformationState> replay_information_states(
    const PlanningStrategy& strategy,
    const std::vector<std::vector<int>>& observation_profiles,
    const std::vector<std::vector<int>>& decision_profiles);

}  // namespace mobility::coordination
