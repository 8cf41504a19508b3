#include "mobility/team_simulation.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace mobility::coordination {

namespace {

// Pairwise summation with a fixed reduction tree: the result depends only
// on the element order, never on chunking or worker count.
double pairwise_sum(const std::vector<double>& values, std::size_t lo, std::size_t hi) {
    if (hi - lo == 0) return 0.0;
    if (hi - lo == 1) return values[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(values, lo, mid) + pairwise_sum(values, mid, hi);
}

double pairwise_sum(const std::vector<double>& values) {
    return pairwise_sum(values, 0, values.size());
}

}  // namespace

DelayedSharingProtocol::DelayedSharingProtocol(std::vector<int> delays)
    : delays_(std::move(delays)) {
    if (delays_.empty()) throw ValidationError("protocol needs at least one member");
    for (int n : delays_)
        if (n < 0) throw ValidationError("sharing delays must be >= 0");
}

void DelayedSharingProtocol::record_observations(int t, const std::vector<int>& observations) {
    if (t != static_cast<int>(observations_.size()))
        throw ProtocolError("observations must be recorded once per step, in order");
    if (observations.size() != delays_.size())
        throw ProtocolError("observation profile must cover every member");
    observations_.push_back(observations);
}

void DelayedSharingProtocol::record_decisions(int t, const std::vector<int>& decisions) {
    if (t != static_cast<int>(decisions_.size()))
        throw ProtocolError("decisions must be recorded once per step, in order");
    if (decisions.size() != delays_.size())
        throw ProtocolError("decision profile must cover every member");
    decisions_.push_back(decisions);
}

std::vector<MemberShare> DelayedSharingProtocol::deliver(int t) const {
    std::vector<MemberShare> out(delays_.size());
    for (std::size_t k = 0; k < delays_.size(); ++k) {
        const int obs_t = t - delays_[k];
        if (obs_t >= 0 && obs_t < static_cast<int>(observations_.size()))
            out[k].observation = observations_[obs_t][k];
        const int dec_t = t - delays_[k] - 1;
        if (dec_t >= 0 && dec_t < static_cast<int>(decisions_.size()))
            out[k].decision = decisions_[dec_t][k];
    }
    return out;
}

std::optional<SharedBatch> DelayedSharingProtocol::deliver_uniform(int t) const {
    for (int n : delays_)
        if (n != delays_.front())
            throw ValidationError("uniform delivery requires equal delays");
    const int n = delays_.front();
    if (t < n) return std::nullopt;

    SharedBatch batch;
    batch.observations = observations_.at(static_cast<std::size_t>(t - n));
    if (t - n - 1 >= 0)
        batch.decisions = decisions_.at(static_cast<std::size_t>(t - n - 1));
    return batch;
}

TeamMemberRuntime::TeamMemberRuntime(const PlanningStrategy& strategy, int member)
    : strategy_(&strategy),
      member_(member),
      pi_(initial_information_state(strategy.model)) {
    if (member < 0 || member >= strategy.model.member_count())
        throw ValidationError("member index out of range");
}

PrivateInfo TeamMemberRuntime::private_info() const {
    PrivateInfo info;
    info.recent_observations.assign(window_observations_.begin(), window_observations_.end());
    info.recent_decisions.assign(window_decisions_.begin(), window_decisions_.end());
    return info;
}

int TeamMemberRuntime::act(int t, const std::optional<SharedBatch>& batch,
                           int own_observation) {
    const TeamModel& model = strategy_->model;
    const int n = model.delay();

    if (batch) {
        common_.batches.push_back(*batch);
        pi_ = update_information_state(pi_, *batch, model);
    }
    if (t == 0) {
        node_ = strategy_->root_for(batch_key(batch));
    } else {
        const PlanNode& prev = strategy_->nodes[static_cast<std::size_t>(node_)];
        auto it = prev.children.find(batch_key(batch));
        if (it == prev.children.end())
            throw ProtocolError("received a shared batch the plan considers impossible");
        node_ = it->second;
    }

    const PlanNode& node = strategy_->nodes[static_cast<std::size_t>(node_)];
    if (node.stage != t)
        throw ProtocolError("plan tree and execution clock disagree");
    if (!(node.info_state == pi_))
        throw ProtocolError(
            "independently recomputed information state disagrees with the plan");

    window_observations_.push_back(own_observation);
    while (static_cast<int>(window_observations_.size()) > n)
        window_observations_.pop_front();

    const PrescriptionProfile* profile = &node.prescriptions;
    PrescriptionProfile adapted;
    if (hook_) {
        adapted = hook_(t, pi_, node.prescriptions);
        profile = &adapted;
    }
    const int decision =
        profile->members[static_cast<std::size_t>(member_)].action_for(private_info().key());

    window_decisions_.push_back(decision);
    while (static_cast<int>(window_decisions_.size()) > std::max(0, n - 1))
        window_decisions_.pop_front();
    return decision;
}

namespace {

EpisodeResult run_episode(const TeamModel& model, const PlanningStrategy& strategy,
                          std::uint64_t episode_seed) {
    Rng rng(episode_seed);
    EpisodeResult result;

    int state = rng.sample(model.initial.probabilities);
    result.collision = model.is_collision_state(state);

    std::vector<TeamMemberRuntime> members;
    members.reserve(static_cast<std::size_t>(model.member_count()));
    for (int k = 0; k < model.member_count(); ++k) members.emplace_back(strategy, k);

    DelayedSharingProtocol protocol(
        std::vector<int>(static_cast<std::size_t>(model.member_count()), model.delay()));

    for (int t = 0; t < model.horizon; ++t) {
        std::vector<int> observations(static_cast<std::size_t>(model.member_count()));
        for (int k = 0; k < model.member_count(); ++k)
            observations[static_cast<std::size_t>(k)] = observe(model, state, k, rng);
        protocol.record_observations(t, observations);
        const auto batch = protocol.deliver_uniform(t);

        std::vector<int> decisions(static_cast<std::size_t>(model.member_count()));
        for (int k = 0; k < model.member_count(); ++k)
            decisions[static_cast<std::size_t>(k)] =
                members[static_cast<std::size_t>(k)].act(t, batch,
                                                         observations[static_cast<std::size_t>(k)]);
        // Every member recomputed the information state from the same shared
        // data with the same pure function; any disagreement is a bug.
        for (int k = 1; k < model.member_count(); ++k)
            if (!(members[static_cast<std::size_t>(k)].information_state() ==
                  members[0].information_state()))
                throw ProtocolError("members disagree on the shared information state");

        protocol.record_decisions(t, decisions);

        TrajectoryStep step_record;
        step_record.t = t;
        step_record.state = state;
        step_record.decisions = decisions;
        step_record.observations = observations;

        const auto [next_state, cost] = step(model, state, decisions, rng);
        step_record.cost = cost;
        result.total_cost += cost;
        result.steps.push_back(std::move(step_record));

        state = next_state;
        result.collision = result.collision || model.is_collision_state(state);
    }
    return result;
}

}  // namespace

SimulationStats simulate_team(const TeamModel& model, const PlanningStrategy& strategy,
                              int episodes, std::uint64_t seed, int workers) {
    if (episodes < 1) throw ValidationError("episode count must be >= 1");
    model.validate();

    SimulationStats stats;
    stats.episodes.resize(static_cast<std::size_t>(episodes));

    auto run_range = [&](int worker, int stride) {
        for (int e = worker; e < episodes; e += stride)
            stats.episodes[static_cast<std::size_t>(e)] =
                run_episode(model, strategy, derive_seed(seed, static_cast<std::uint64_t>(e)));
    };

    if (workers <= 1) {
        run_range(0, 1);
    } else {
        std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w]() {
                try {
                    run_range(w, workers);
                } catch (...) {
                    failures[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        for (const auto& f : failures)
            if (f) std::rethrow_exception(f);
    }

    std::vector<double> costs(static_cast<std::size_t>(episodes));
    for (int e = 0; e < episodes; ++e) {
        costs[static_cast<std::size_t>(e)] = stats.episodes[static_cast<std::size_t>(e)].total_cost;
        if (stats.episodes[static_cast<std::size_t>(e)].collision) ++stats.collision_episodes;
    }
    stats.mean_cost = pairwise_sum(costs) / static_cast<double>(episodes);
    if (episodes > 1) {
        std::vector<double> squares(costs.size());
        for (std::size_t i = 0; i < costs.size(); ++i) {
            const double d = costs[i] - stats.mean_cost;
            squares[i] = d * d;
        }
        const double variance = pairwise_sum(squares) / static_cast<double>(episodes - 1);
        stats.standard_error = std::sqrt(variance / static_cast<double>(episodes));
    }
    return stats;
}

std::vector<InformationState> replay_information_states(
    const PlanningStrategy& strategy,
    const std::vector<std::vector<int>>& observation_profiles,
    const std::vector<std::vector<int>>& decision_profiles) {
    const TeamModel& model = strategy.model;
    DelayedSharingProtocol protocol(
        std::vector<int>(static_cast<std::size_t>(model.member_count()), model.delay()));

    std::vector<InformationState> out;
    InformationState pi = initial_information_state(model);
    for (std::size_t t = 0; t < observation_profiles.size(); ++t) {
        protocol.record_observations(static_cast<int>(t), observation_profiles[t]);
        const auto batch = protocol.deliver_uniform(static_cast<int>(t));
        if (batch) pi = update_information_state(pi, *batch, model);
        out.push_back(pi);
        if (t < decision_profiles.size())
            protocol.record_decisions(static_cast<int>(t), decision_profiles[t]);
    }
    return out;
}

}  // namespace mobility::coordination
