#pragma once

#include <optional>
#include <vector>

#include "mobility/team.hpp"

namespace mobility::coordination {

/// Probability vector over the delayed team state. Entries are >= 0 and sum
/// to 1 within 1e-12 after every update.
struct InformationState {
    std::vector<double> probabilities;

    int size() const { return static_cast<int>(probabilities.size()); }
    void validate() const;

    bool operator==(const InformationState&) const = default;
};

/// One delivery of the sharing protocol: the observation profile made n
/// steps ago and, once available, the decision profile made n+1 steps ago.
/// The very first delivery carries observations only.
struct SharedBatch {
    std::vector<int> observations;      // one per member
    std::vector<int> decisions;         // one per member; empty on the initial fill

    bool has_decisions() const { return !decisions.empty(); }

    bool operator==(const SharedBatch&) const = default;
    bool operator<(const SharedBatch& other) const {
        if (observations != other.observations) return observations < other.observations;
        return decisions < other.decisions;
    }
};

/// Everything every member knows in common: the accumulated shared batches.
/// Grows by exactly one batch per step once sharing has begun.
struct CommonInfo {
    std::vector<SharedBatch> batches;

    int size() const { return static_cast<int>(batches.size()); }
};

/// A member's recent private window: its last n observations and its last
/// n-1 decisions (shorter while warming up).
struct PrivateInfo {
    std::vector<int> recent_observations;
    std::vector<int> recent_decisions;

    /// Flat encoding used to key prescriptions: observations then decisions.
    std::vector<int> key() const;
};

/// Exact Bayes step of the delayed-state filter: push the current belief
/// through the dynamics with the batch's realized decision profile (skipped
/// on the initial observation-only fill), then condition on the batch's
/// realized observation profile. Depends only on realized shared data,
/// never on any strategy object. Throws ProtocolError when the batch has
/// zero probability under the model (inconsistent shared data).
InformationState update_information_state(const InformationState& pi,
                                          const SharedBatch& batch,
                                          const TeamModel& model);

/// The belief before any sharing: the model's initial state distribution.
InformationState initial_information_state(const TeamModel& model);

}  // namespace mobility::coordination
