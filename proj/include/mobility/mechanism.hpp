#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mobility/solver.hpp"

namespace mobility::mechanism {

using market::PlannerConfig;
using network::Scenario;
using network::ServiceId;
using network::TravelerId;

enum class PaymentMode { clarke, clarke_floored };

struct PaymentRule {
    PaymentMode mode = PaymentMode::clarke_floored;

    bool floor_active() const { return mode == PaymentMode::clarke_floored; }
    static PaymentRule parse(const std::string& name);
    std::string name() const;
};

struct TravelerPayment {
    TravelerId id = 0;
    ServiceId service = 0;
    double payment = 0.0;
    double operating_share = 0.0;            // cost of the assigned service seat
    double welfare_without = 0.0;            // optimum of the economy without this traveler
    double others_welfare_at_optimum = 0.0;  // everyone else's welfare at the full optimum
    bool floored = false;                    // clamp was applied
};

struct PaymentResult {
    std::vector<TravelerPayment> items;  // ordered as the sorted subclass
    std::vector<double> payments() const;
    /// Travelers whose presence raised the others' achievable welfare
    /// (negative raw Clarke term). Informational; logged, never asserted.
    std::vector<TravelerId> negative_externality_travelers() const;
};

/// Clarke payments adapted to the constrained subclass problem: each
/// traveler pays the welfare the others lose from its presence, where
/// welfare is the planner's weighted objective negated (valuations weighted
/// by omega1, operating costs by omega2). In floored mode payments are
/// clamped from below by the assigned service's operating share. Throws
/// InfeasibleError when the full or any marginal economy is infeasible.
PaymentResult clarke_payments(const std::vector<TravelerId>& subclass,
                              const Scenario& scenario, const PlannerConfig& config,
                              const PaymentRule& rule);

/// Deterministic misreport grid: multiplicative preferred-travel-time
/// factors x co-traveler-tolerance shifts x value-of-time replacements.
/// max_points = 0 uses the full grid; otherwise a seeded subsample.
struct MisreportGrid {
    std::vector<double> theta_factors = {0.5, 0.875, 1.25, 1.625, 2.0};
    std::vector<int> eta_deltas = {-2, -1, 0, 1, 2};
    std::vector<double> delta_values = {0.0, 0.25, 0.5, 0.75, 1.0};
    std::size_t max_points = 0;

    std::size_t full_size() const {
        return theta_factors.size() * eta_deltas.size() * delta_values.size();
    }
};

enum class MechanismProperty { incentive_compatibility, individual_rationality, weak_budget_balance };

struct Witness {
    TravelerId traveler = 0;
    std::string description;   // which misreport / which comparison failed
    double utility_gain = 0.0; // strict gain over the truthful / compliant outcome
};

struct PropertyReport {
    MechanismProperty property{};
    std::vector<Witness> witnesses;
    long instances_tested = 0;
    double aggregate_surplus = 0.0;  // sum of (payment - operating share); reported for WBB

    bool violated() const { return !witnesses.empty(); }
    std::string verdict() const { return violated() ? "violated" : "holds-on-tested-grid"; }
};

/// For every traveler and every grid misreport, re-solves the market under
/// the misreport and evaluates the traveler's utility at its true
/// preferences; any strict gain above 1e-9 is reported as a witness.
PropertyReport verify_incentive_compatibility(const Scenario& scenario,
                                              const PlannerConfig& config,
                                              const MisreportGrid& grid, std::uint64_t seed,
                                              const PaymentRule& rule = {PaymentMode::clarke});

/// Compares each traveler's recommended utility against the opt-out of
/// driving the fallback service alone at its own operating cost.
PropertyReport verify_individual_rationality(
    const Scenario& scenario, const PlannerConfig& config,
    const PaymentRule& rule = {PaymentMode::clarke});

/// Checks payment >= operating share per traveler (tolerance 1e-9) and
/// reports the aggregate surplus alongside.
PropertyReport verify_weak_budget_balance(
    const Scenario& scenario, const PlannerConfig& config,
    const PaymentRule& rule = {PaymentMode::clarke_floored});

}  // namespace mobility::mechanism
