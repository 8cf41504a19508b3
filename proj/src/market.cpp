#include "mobility/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mobility::market {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

}  // namespace

int Assignment::index_of(TravelerId traveler) const {
    for (std::size_t i = 0; i < travelers.size(); ++i)
        if (travelers[i] == traveler) return static_cast<int>(i);
    return -1;
}

ServiceId Assignment::service_of(TravelerId traveler) const {
    const int i = index_of(traveler);
    if (i < 0) fail("traveler " + std::to_string(traveler) + " is not in this assignment");
    return services[i];
}

int Assignment::entry(TravelerId traveler, ServiceId service) const {
    return service_of(traveler) == service ? 1 : 0;
}

int co_travelers(const Assignment& assignment, TravelerId traveler) {
    const ServiceId assigned = assignment.service_of(traveler);
    int users = 0;
    for (ServiceId s : assignment.services)
        if (s == assigned) ++users;
    return users - 1;
}

double experienced_travel_time(const Assignment& assignment, TravelerId traveler,
                               const Scenario& scenario) {
    const auto& t = scenario.traveler(traveler);
    const ServiceId sid = assignment.service_of(traveler);
    const auto& service = scenario.service(sid);
    const double tau = network::base_travel_time(scenario, sid, t.origin, t.destination);
    if (!(tau < std::numeric_limits<double>::infinity()))
        fail("traveler " + std::to_string(traveler) + " is assigned service " +
             std::to_string(sid) + " which does not serve its origin-destination pair");
    const int psi = co_travelers(assignment, traveler);
    return tau * (1.0 + service.congestion_slope * static_cast<double>(psi) /
                            static_cast<double>(service.capacity));
}

double inconvenience(const network::Preferences& preferences, double willingness_to_pay,
                     double experienced_travel_time, int co_travelers, ServiceId service,
                     double co_traveler_penalty) {
    if (experienced_travel_time < 0.0) fail("experienced travel time must be >= 0");
    if (co_travelers < 0) fail("co-traveler count must be >= 0");
    const double delay_excess =
        std::max(0.0, experienced_travel_time - preferences.preferred_travel_time);
    const double crowding_excess = std::max(
        0, co_travelers - preferences.max_co_travelers_for(service));
    const double raw = preferences.value_of_time_for(service) * delay_excess +
                       co_traveler_penalty * crowding_excess;
    return std::min(willingness_to_pay, raw);
}

double valuation(const network::Traveler& traveler, double inconvenience) {
    if (inconvenience < 0.0 || inconvenience > traveler.max_willingness_to_pay)
        fail("traveler " + std::to_string(traveler.id) +
             ": inconvenience must lie in [0, willingness-to-pay]");
    return traveler.max_willingness_to_pay - inconvenience;
}

double operating_cost(ServiceId service, const Assignment& assignment,
                      const Scenario& scenario) {
    const double share = scenario.service(service).per_traveler_cost;
    double total = 0.0;
    for (ServiceId s : assignment.services)
        if (s == service) total += share;
    return total;
}

MarketOutcome evaluate_outcome(const Assignment& assignment,
                               const std::vector<double>& payments,
                               const Scenario& scenario, const PlannerConfig& config) {
    if (assignment.travelers.size() != assignment.services.size())
        fail("assignment traveler/service vectors disagree in length");
    if (payments.size() != assignment.travelers.size())
        fail("payment vector length must match the subclass size");

    MarketOutcome out;
    out.assignment = assignment;
    out.per_traveler.reserve(assignment.travelers.size());

    double phi_total = 0.0;
    double value_total = 0.0;
    for (std::size_t i = 0; i < assignment.travelers.size(); ++i) {
        const TravelerId tid = assignment.travelers[i];
        const auto& t = scenario.traveler(tid);
        TravelerOutcome row;
        row.id = tid;
        row.service = assignment.services[i];
        row.co_travelers = co_travelers(assignment, tid);
        row.experienced_travel_time = experienced_travel_time(assignment, tid, scenario);
        row.inconvenience =
            inconvenience(t.preferences, t.max_willingness_to_pay,
                          row.experienced_travel_time, row.co_travelers, row.service,
                          config.co_traveler_penalty);
        row.valuation = valuation(t, row.inconvenience);
        row.payment = payments[i];
        row.utility = row.valuation - row.payment;
        phi_total += row.inconvenience;
        value_total += row.valuation;
        out.per_traveler.push_back(row);
    }

    double cost_total = 0.0;
    for (const auto& s : scenario.services) {
        const double r = operating_cost(s.id, assignment, scenario);
        if (r > 0.0) out.per_service_cost[s.id] = r;
        cost_total += r;
    }

    out.objective = config.omega1 * phi_total + config.omega2 * cost_total;
    out.welfare = value_total - cost_total;
    return out;
}

double gini(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    if (values.empty()) return 0.0;
    double total = 0.0;
    for (double v : values) total += v;
    if (total <= 0.0) return 0.0;
    double spread = 0.0;
    for (double a : values)
        for (double b : values) spread += std::abs(a - b);
    return spread / (2.0 * n * total);
}

double equity_gini(const MarketOutcome& outcome) {
    std::vector<double> phis;
    phis.reserve(outcome.per_traveler.size());
    for (const auto& row : outcome.per_traveler) phis.push_back(row.inconvenience);
    return gini(phis);
}

}  // namespace mobility::market
