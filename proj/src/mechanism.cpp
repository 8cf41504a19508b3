#include "mobility/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mobility/rng.hpp"

namespace mobility::mechanism {

namespace {

constexpr double kGainTolerance = 1e-9;

struct SubclassEconomy {
    std::vector<TravelerId> members;  // sorted
    solver::SolveResult optimum;
    market::MarketOutcome outcome;  // zero payments, used for valuations
};

SubclassEconomy solve_economy(const std::vector<TravelerId>& subclass,
                              const Scenario& scenario, const PlannerConfig& config,
                              const std::string& what) {
    SubclassEconomy econ;
    econ.members = subclass;
    std::sort(econ.members.begin(), econ.members.end());
    econ.optimum = solver::solve_subclass(econ.members, scenario, config);
    if (econ.optimum.status != solver::SolveStatus::optimal)
        throw InfeasibleError(what + ": the equity bound excludes every feasible assignment");
    econ.outcome = market::evaluate_outcome(
        econ.optimum.assignment, std::vector<double>(econ.members.size(), 0.0), scenario,
        config);
    return econ;
}

/// Weighted welfare contribution of one outcome row: omega1 * valuation
/// minus omega2 * operating share.
double welfare_contribution(const market::TravelerOutcome& row, const Scenario& scenario,
                            const PlannerConfig& config) {
    return config.omega1 * row.valuation -
           config.omega2 * scenario.service(row.service).per_traveler_cost;
}

double total_welfare(const SubclassEconomy& econ, const Scenario& scenario,
                     const PlannerConfig& config) {
    double w = 0.0;
    for (const auto& row : econ.outcome.per_traveler)
        w += welfare_contribution(row, scenario, config);
    return w;
}

/// Optimal weighted welfare of the subclass without one traveler. For a
/// singleton subclass this is the empty economy, worth zero.
double welfare_without(const std::vector<TravelerId>& members, TravelerId removed,
                       const Scenario& scenario, const PlannerConfig& config) {
    std::vector<TravelerId> rest;
    for (TravelerId id : members)
        if (id != removed) rest.push_back(id);
    if (rest.empty()) return 0.0;
    const auto econ = solve_economy(rest, scenario, config,
                                    "marginal economy without traveler " +
                                        std::to_string(removed));
    return total_welfare(econ, scenario, config);
}

struct Misreport {
    double theta_factor = 1.0;
    int eta_delta = 0;
    double delta_value = 0.0;

    std::string describe() const {
        std::ostringstream out;
        out << "theta*" << theta_factor << ", eta" << (eta_delta >= 0 ? "+" : "")
            << eta_delta << ", delta=" << delta_value;
        return out.str();
    }
};

network::Preferences apply_misreport(const network::Preferences& truth, const Misreport& m) {
    network::Preferences reported = truth;
    reported.preferred_travel_time = truth.preferred_travel_time * m.theta_factor;
    for (auto& [sid, eta] : reported.max_co_travelers) eta = std::max(0, eta + m.eta_delta);
    for (auto& [sid, delta] : reported.value_of_time) delta = m.delta_value;
    return reported;
}

std::vector<Misreport> build_grid(const MisreportGrid& grid, std::uint64_t seed) {
    std::vector<Misreport> cells;
    cells.reserve(grid.full_size());
    for (double f : grid.theta_factors)
        for (int d : grid.eta_deltas)
            for (double v : grid.delta_values) cells.push_back({f, d, v});
    if (grid.max_points > 0 && grid.max_points < cells.size()) {
        Rng rng(derive_seed(seed, 0x6d69737265ULL));
        std::vector<std::size_t> order(cells.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(
                                        0, static_cast<int>(i) - 1))]);
        order.resize(grid.max_points);
        std::sort(order.begin(), order.end());
        std::vector<Misreport> picked;
        picked.reserve(order.size());
        for (std::size_t i : order) picked.push_back(cells[i]);
        cells = std::move(picked);
    }
    return cells;
}

/// The traveler's utility evaluated at its TRUE preferences under whatever
/// assignment and payment the (possibly misreported) market produced.
double true_utility(const network::Traveler& truth, const market::MarketOutcome& outcome,
                    double payment, const PlannerConfig& config) {
    for (const auto& row : outcome.per_traveler) {
        if (row.id != truth.id) continue;
        const double phi = market::inconvenience(
            truth.preferences, truth.max_willingness_to_pay, row.experienced_travel_time,
            row.co_travelers, row.service, config.co_traveler_penalty);
        return market::valuation(truth, phi) - payment;
    }
    throw Error("traveler " + std::to_string(truth.id) + " missing from outcome");
}

}  // namespace

PaymentRule PaymentRule::parse(const std::string& name) {
    if (name == "clarke") return {PaymentMode::clarke};
    if (name == "clarke-floored") return {PaymentMode::clarke_floored};
    throw Error("unknown payment mode '" + name + "' (expected clarke or clarke-floored)");
}

std::string PaymentRule::name() const {
    return mode == PaymentMode::clarke ? "clarke" : "clarke-floored";
}

std::vector<double> PaymentResult::payments() const {
    std::vector<double> out;
    out.reserve(items.size());
    for (const auto& item : items) out.push_back(item.payment);
    return out;
}

std::vector<TravelerId> PaymentResult::negative_externality_travelers() const {
    std::vector<TravelerId> out;
    for (const auto& item : items)
        if (item.welfare_without < item.others_welfare_at_optimum - kGainTolerance)
            out.push_back(item.id);
    return out;
}

PaymentResult clarke_payments(const std::vector<TravelerId>& subclass,
                              const Scenario& scenario, const PlannerConfig& config,
                              const PaymentRule& rule) {
    const auto econ = solve_economy(subclass, scenario, config, "subclass economy");

    PaymentResult result;
    result.items.reserve(econ.members.size());
    for (const auto& row : econ.outcome.per_traveler) {
        TravelerPayment item;
        item.id = row.id;
        item.service = row.service;
        item.operating_share = scenario.service(row.service).per_traveler_cost;
        item.welfare_without = welfare_without(econ.members, row.id, scenario, config);

        double others = 0.0;
        for (const auto& other : econ.outcome.per_traveler)
            if (other.id != row.id) others += welfare_contribution(other, scenario, config);
        item.others_welfare_at_optimum = others;

        item.payment = item.welfare_without - others;
        if (rule.floor_active() && item.payment < item.operating_share) {
            item.payment = item.operating_share;
            item.floored = true;
        }
        result.items.push_back(item);
    }

    for (TravelerId id : result.negative_externality_travelers())
        log_line("traveler " + std::to_string(id) +
                 " raises the others' achievable welfare (negative Clarke term)");
    return result;
}

PropertyReport verify_incentive_compatibility(const Scenario& scenario,
                                              const PlannerConfig& config,
                                              const MisreportGrid& grid, std::uint64_t seed,
                                              const PaymentRule& rule) {
    PropertyReport report;
    report.property = MechanismProperty::incentive_compatibility;

    const auto cells = build_grid(grid, seed);
    const auto partition = network::partition_subclasses(scenario.travelers);

    for (const auto& subclass : partition.subclasses) {
        // Enumeration guard: the verifier re-solves the market per cell.
        const solver::SubclassContext probe(subclass, scenario, config);
        double candidates = 1.0;
        for (int i = 0; i < probe.member_count(); ++i)
            candidates *= static_cast<double>(probe.menu_size());
        if (candidates > 1e6)
            throw InstanceTooLargeError(
                "incentive-compatibility verification needs exhaustive re-solves; subclass "
                "with " +
                std::to_string(probe.member_count()) + " travelers x " +
                std::to_string(probe.menu_size()) + " services is too large");

        const auto truthful = solve_economy(subclass, scenario, config, "subclass economy");
        const auto truthful_payments = clarke_payments(subclass, scenario, config, rule);

        for (std::size_t pos = 0; pos < truthful.members.size(); ++pos) {
            const TravelerId tid = truthful.members[pos];
            const auto& truth = scenario.traveler(tid);
            const double baseline =
                true_utility(truth, truthful.outcome,
                             truthful_payments.items[pos].payment, config);
            // The economy without this traveler never sees its report, so
            // this term is shared by every misreport.
            const double without = truthful_payments.items[pos].welfare_without;

            for (const auto& cell : cells) {
                ++report.instances_tested;

                Scenario reported = scenario;
                for (auto& t : reported.travelers)
                    if (t.id == tid) t.preferences = apply_misreport(truth.preferences, cell);

                const auto econ =
                    solve_economy(subclass, reported, config, "misreported economy");
                double others = 0.0;
                double own_share = 0.0;
                for (const auto& other : econ.outcome.per_traveler) {
                    if (other.id == tid)
                        own_share = reported.service(other.service).per_traveler_cost;
                    else
                        others += welfare_contribution(other, reported, config);
                }
                double payment = without - others;
                if (rule.floor_active()) payment = std::max(payment, own_share);

                const double utility = true_utility(truth, econ.outcome, payment, config);
                if (utility > baseline + kGainTolerance)
                    report.witnesses.push_back(
                        {tid, cell.describe(), utility - baseline});
            }
        }
    }
    return report;
}

PropertyReport verify_individual_rationality(const Scenario& scenario,
                                             const PlannerConfig& config,
                                             const PaymentRule& rule) {
    PropertyReport report;
    report.property = MechanismProperty::individual_rationality;

    const ServiceId fallback = scenario.fallback_id();
    const auto partition = network::partition_subclasses(scenario.travelers);
    for (const auto& subclass : partition.subclasses) {
        const auto econ = solve_economy(subclass, scenario, config, "subclass economy");
        const auto payments = clarke_payments(subclass, scenario, config, rule);

        for (std::size_t pos = 0; pos < econ.members.size(); ++pos) {
            ++report.instances_tested;
            const auto& truth = scenario.traveler(econ.members[pos]);
            const double recommended =
                true_utility(truth, econ.outcome, payments.items[pos].payment, config);

            // Opt-out: drive the fallback alone and pay its operating cost.
            const double tau = network::base_travel_time(scenario, fallback, truth.origin,
                                                         truth.destination);
            const double phi = market::inconvenience(
                truth.preferences, truth.max_willingness_to_pay, tau, 0, fallback,
                config.co_traveler_penalty);
            const double opt_out = market::valuation(truth, phi) -
                                   scenario.service(fallback).per_traveler_cost;

            if (recommended < opt_out - kGainTolerance)
                report.witnesses.push_back({truth.id,
                                            "opt-out to the fallback service beats the "
                                            "recommendation",
                                            opt_out - recommended});
        }
    }
    return report;
}

PropertyReport verify_weak_budget_balance(const Scenario& scenario,
                                          const PlannerConfig& config,
                                          const PaymentRule& rule) {
    PropertyReport report;
    report.property = MechanismProperty::weak_budget_balance;

    const auto partition = network::partition_subclasses(scenario.travelers);
    for (const auto& subclass : partition.subclasses) {
        const auto payments = clarke_payments(subclass, scenario, config, rule);
        for (const auto& item : payments.items) {
            ++report.instances_tested;
            const double surplus = item.payment - item.operating_share;
            report.aggregate_surplus += surplus;
            if (surplus < -kGainTolerance)
                report.witnesses.push_back(
                    {item.id,
                     "payment below the operating share of service " +
                         std::to_string(item.service),
                     -surplus});
        }
    }
    return report;
}

}  // namespace mobility::mechanism
