#pragma once

#include <functional>
#include <map>

#include "mobility/information_state.hpp"

namespace mobility::coordination {

/// Flat encoding of one member's private window: recent observations then
/// recent own decisions.
using LambdaKey = std::vector<int>;

/// One member's decision rule for one stage: realized private window ->
/// action. Total on the windows that can occur at the owning plan node.
struct MemberPrescription {
    std::vector<std::pair<LambdaKey, int>> rules;  // sorted by window key

    int action_for(const LambdaKey& window) const;
    bool constant() const;  // same action for every window

    bool operator==(const MemberPrescription&) const = default;
};

struct PrescriptionProfile {
    std::vector<MemberPrescription> members;

    bool operator==(const PrescriptionProfile&) const = default;
};

/// One reachable common-information point: everything the whole team can
/// deduce from the shared history at one stage.
struct PlanNode {
    int stage = 0;
    InformationState info_state;  // belief over the delayed state
    double value = 0.0;           // optimal expected cost to go
    PrescriptionProfile prescriptions;
    std::map<std::vector<int>, int> children;  // shared-batch key -> node id
};

struct PlanningLimits {
    double max_profiles_per_node = 65536.0;
    std::size_t max_value_entries = 200000;
};

/// Solved plan: a tree of reachable common-information points (walked at
/// execution time by matching realized shared batches) plus the per-stage
/// association from reached information states to prescription profiles.
struct PlanningStrategy {
    TeamModel model;
    std::vector<PlanNode> nodes;
    std::map<std::vector<int>, int> roots;  // first-batch key; single empty key when delay >= 1
    double value = 0.0;                     // expected total cost from the start

    struct PsiEntry {
        InformationState info_state;
        PrescriptionProfile prescriptions;
    };
    std::vector<std::vector<PsiEntry>> stage_policies;

    int root_for(const std::vector<int>& first_batch_key) const;

    /// Information-state lookup of the stage policy (exact match on the
    /// reached support points).
    const PrescriptionProfile* prescriptions_for(int stage, const InformationState& pi) const;
};

/// Encoding of a delivered batch used to index plan-tree edges; the empty
/// key stands for "nothing shared this step".
std::vector<int> batch_key(const std::optional<SharedBatch>& batch);

/// Exact backward induction over the reachable common-information beliefs:
/// at every stage and belief, every prescription profile over the support
/// of the members' private windows is evaluated (expected immediate cost
/// plus expected continuation) and the minimizer is kept, ties broken by
/// lexicographic prescription-profile order. Requires a uniform sharing
/// delay. Throws InstanceTooLargeError with the offending count when the
/// enumeration exceeds the limits.
PlanningStrategy solve_planning(const TeamModel& model, const PlanningLimits& limits = {});

/// Optimal cost to go from `stage` when the belief over the delayed state
/// is `pi` and the in-flight data is generated canonically (pending
/// decisions fixed to each member's first action). Used to probe the value
/// function at arbitrary beliefs, e.g. for concavity checks; linear lifting
/// makes this concave and piecewise linear in `pi`.
double stage_value(const TeamModel& model, int stage, const InformationState& pi,
                   const PlanningLimits& limits = {});

}  // namespace mobility::coordination
