#include "mobility/information_state.hpp"

#include <cmath>
#include <string>

namespace mobility::coordination {

void InformationState::validate() const {
    double total = 0.0;
    for (double p : probabilities) {
        if (p < 0.0) throw ValidationError("information state: entries must be >= 0");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ValidationError("information state: entries must sum to 1 within 1e-12");
}

std::vector<int> PrivateInfo::key() const {
    std::vector<int> out = recent_observations;
    out.insert(out.end(), recent_decisions.begin(), recent_decisions.end());
    return out;
}

InformationState initial_information_state(const TeamModel& model) {
    return InformationState{model.initial.probabilities};
}

InformationState update_information_state(const InformationState& pi,
                                          const SharedBatch& batch,
                                          const TeamModel& model) {
    const int n = model.state_count();
    if (pi.size() != n)
        throw ValidationError("information state size does not match the model");
    if (static_cast<int>(batch.observations.size()) != model.member_count())
        throw ProtocolError("shared batch must carry one observation per member");
    if (batch.has_decisions() &&
        static_cast<int>(batch.decisions.size()) != model.member_count())
        throw ProtocolError("shared batch must carry one decision per member");

    // Predict through the realized shared decision profile.
    std::vector<double> predicted(n, 0.0);
    if (batch.has_decisions()) {
        const int joint = model.joint_action_index(batch.decisions);
        for (int x = 0; x < n; ++x) {
            if (pi.probabilities[x] == 0.0) continue;
            for (int next = 0; next < n; ++next) {
                const double p = model.transition_probability(x, joint, next);
                if (p > 0.0) predicted[next] += pi.probabilities[x] * p;
            }
        }
    } else {
        predicted = pi.probabilities;
    }

    // Correct with the realized shared observation profile.
    std::vector<double> corrected(n, 0.0);
    double total = 0.0;
    for (int x = 0; x < n; ++x) {
        if (predicted[x] == 0.0) continue;
        double likelihood = 1.0;
        for (int k = 0; k < model.member_count(); ++k)
            likelihood *= model.observation_probability(k, x, batch.observations[k]);
        corrected[x] = predicted[x] * likelihood;
        total += corrected[x];
    }
    if (total <= 0.0)
        throw ProtocolError(
            "shared data has zero probability under the model (inconsistent evidence)");

    for (double& p : corrected) p /= total;
    InformationState out{std::move(corrected)};
    out.validate();
    return out;
}

}  // namespace mobility::coordination
