#pragma once

#include <map>
#include <string>
#include <vector>

#include "mobility/errors.hpp"
#include "mobility/planner_config.hpp"

namespace mobility::network {

using NodeId = std::string;
using ServiceId = int;
using TravelerId = int;

/// One edge of the city multigraph. Parallel links between the same node
/// pair are allowed; each link belongs to exactly one mobility service.
struct Link {
    NodeId from;
    NodeId to;
    ServiceId service;
    double travel_time = 0.0;  // minutes, > 0

    bool operator==(const Link&) const = default;
};

/// Undirected multigraph of neighborhoods and service links.
struct Network {
    std::vector<NodeId> nodes;
    std::vector<Link> links;

    bool has_node(const NodeId& n) const;

    bool operator==(const Network&) const = default;
};

/// A transportation mode usable by many travelers at once. The fallback
/// service models the self-owned vehicle: it is always available, may
/// traverse every link of the network, and its capacity must cover the
/// whole traveler population.
struct MobilityService {
    ServiceId id = 0;
    int capacity = 0;                // max simultaneous users
    double per_traveler_cost = 0.0;  // operating cost charged per assigned traveler
    double congestion_slope = 0.0;   // >= 0, dimensionless
    bool is_fallback = false;

    bool operator==(const MobilityService&) const = default;
};

/// Personal travel preferences. Per-service maps are total: the loader
/// expands scalar shorthands so every declared service has an entry.
struct Preferences {
    double preferred_travel_time = 0.0;          // minutes, >= 0
    std::map<ServiceId, int> max_co_travelers;   // tolerated co-travelers per service
    std::map<ServiceId, double> value_of_time;   // money per minute of delay, in [0, 1]

    int max_co_travelers_for(ServiceId service) const;
    double value_of_time_for(ServiceId service) const;

    bool operator==(const Preferences&) const = default;
};

struct Traveler {
    TravelerId id = 0;
    NodeId origin;
    NodeId destination;
    Preferences preferences;
    double max_willingness_to_pay = 0.0;  // > 0
    double discount_rate = 0.0;           // strictly inside (0, 1)

    bool operator==(const Traveler&) const = default;
};

/// Travelers grouped by exact origin-destination pair. Subclasses are
/// ordered by their smallest member id; members are sorted by id.
struct SubclassPartition {
    std::vector<std::vector<TravelerId>> subclasses;

    int count() const { return static_cast<int>(subclasses.size()); }
};

/// Complete immutable description of one problem instance.
struct Scenario {
    Network network;
    std::vector<MobilityService> services;  // sorted by id
    std::vector<Traveler> travelers;        // sorted by id
    market::PlannerConfig planner;

    const MobilityService& service(ServiceId id) const;
    const Traveler& traveler(TravelerId id) const;
    ServiceId fallback_id() const;

    /// Checks every type invariant (referential integrity, positivity,
    /// willingness-to-pay above operating cost for every feasible service,
    /// fallback capacity covering the population). Throws ValidationError
    /// naming the violated rule and the offending entity.
    void validate() const;

    bool operator==(const Scenario&) const;
};

/// Groups travelers by exact (origin, destination) equality. Order
/// insensitive: any permutation of the input yields the same partition.
SubclassPartition partition_subclasses(const std::vector<Traveler>& travelers);

/// Every service whose links connect the traveler's origin to their
/// destination, plus the fallback service. Sorted by service id. Throws
/// ValidationError when not even the fallback connects the pair.
std::vector<ServiceId> feasible_services(const Traveler& traveler, const Scenario& scenario);

/// Shortest travel time from `origin` to `destination` restricted to the
/// given service's links (the fallback service may use all links).
/// Returns +infinity when no such path exists.
double base_travel_time(const Scenario& scenario, ServiceId service,
                        const NodeId& origin, const NodeId& destination);

}  // namespace mobility::network
