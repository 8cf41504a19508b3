#pragma once

#include <map>
#include <vector>

#include "mobility/network.hpp"
#include "mobility/planner_config.hpp"

namespace mobility::market {

using network::NodeId;
using network::Scenario;
using network::ServiceId;
using network::TravelerId;

/// One subclass's traveler-service assignment. Stored as one service per
/// traveler, which enforces the binary row-sum-one invariant by
/// construction; entry() exposes the matrix view.
struct Assignment {
    std::vector<TravelerId> travelers;  // subclass members, sorted by id
    std::vector<ServiceId> services;    // assigned service per member, same order

    int entry(TravelerId traveler, ServiceId service) const;
    ServiceId service_of(TravelerId traveler) const;
    int index_of(TravelerId traveler) const;  // -1 when absent
    int size() const { return static_cast<int>(travelers.size()); }

    bool operator==(const Assignment&) const = default;
};

struct TravelerOutcome {
    TravelerId id = 0;
    ServiceId service = 0;
    int co_travelers = 0;                 // others on the same service
    double experienced_travel_time = 0.0; // minutes, congestion included
    double inconvenience = 0.0;           // money
    double valuation = 0.0;               // money, in [0, willingness-to-pay]
    double payment = 0.0;                 // money
    double utility = 0.0;                 // valuation - payment
};

/// Assignment plus every derived per-traveler and per-service quantity.
struct MarketOutcome {
    Assignment assignment;
    std::vector<TravelerOutcome> per_traveler;     // ordered as assignment.travelers
    std::map<ServiceId, double> per_service_cost;  // operating cost of used services
    double objective = 0.0;  // omega1 * sum(inconvenience) + omega2 * sum(operating cost)
    double welfare = 0.0;    // sum(valuation) - sum(operating cost)
};

/// Number of other subclass members sharing the traveler's assigned service.
int co_travelers(const Assignment& assignment, TravelerId traveler);

/// Travel time experienced under the assignment: base shortest-path time of
/// the assigned service scaled by 1 + slope * co_travelers / capacity.
double experienced_travel_time(const Assignment& assignment, TravelerId traveler,
                               const Scenario& scenario);

/// Money dis-utility of delay beyond the preferred travel time plus crowding
/// beyond the tolerated co-traveler count, capped at the traveler's
/// willingness-to-pay. Nondecreasing in both arguments; strictly increasing
/// below the cap when the respective weight is positive.
double inconvenience(const network::Preferences& preferences, double willingness_to_pay,
                     double experienced_travel_time, int co_travelers, ServiceId service,
                     double co_traveler_penalty);

/// Valuation = willingness-to-pay minus inconvenience. Requires the
/// inconvenience to lie in [0, willingness-to-pay].
double valuation(const network::Traveler& traveler, double inconvenience);

/// Operating cost of one service under the assignment: per-traveler cost
/// summed over its assigned users. Zero when unused.
double operating_cost(ServiceId service, const Assignment& assignment,
                      const Scenario& scenario);

/// Evaluates every MarketOutcome field for a subclass assignment and a
/// payment vector (ordered as assignment.travelers).
MarketOutcome evaluate_outcome(const Assignment& assignment,
                               const std::vector<double>& payments,
                               const Scenario& scenario, const PlannerConfig& config);

/// Gini coefficient of a non-negative vector; 0 for an all-equal or all-zero
/// vector, always within [0, 1].
double gini(const std::vector<double>& values);

/// Gini coefficient of the outcome's inconvenience vector.
double equity_gini(const MarketOutcome& outcome);

}  // namespace mobility::market
