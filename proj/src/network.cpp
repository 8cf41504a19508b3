#include "mobility/network.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

namespace mobility {

bool log_enabled() {
    const char* v = std::getenv("MOBILITY_LOG");
    return v != nullptr && *v != '\0';
}

void log_line(const std::string& line) {
    if (log_enabled()) std::cerr << "[mobility] " << line << "\n";
}

}  // namespace mobility

namespace mobility::network {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

std::string traveler_tag(const Traveler& t) {
    return "traveler " + std::to_string(t.id);
}

}  // namespace

bool Network::has_node(const NodeId& n) const {
    return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

int Preferences::max_co_travelers_for(ServiceId service) const {
    auto it = max_co_travelers.find(service);
    if (it == max_co_travelers.end())
        fail("preferences missing co-traveler tolerance for service " + std::to_string(service));
    return it->second;
}

double Preferences::value_of_time_for(ServiceId service) const {
    auto it = value_of_time.find(service);
    if (it == value_of_time.end())
        fail("preferences missing value-of-time for service " + std::to_string(service));
    return it->second;
}

const MobilityService& Scenario::service(ServiceId id) const {
    for (const auto& s : services)
        if (s.id == id) return s;
    fail("unknown service id " + std::to_string(id));
}

const Traveler& Scenario::traveler(TravelerId id) const {
    for (const auto& t : travelers)
        if (t.id == id) return t;
    fail("unknown traveler id " + std::to_string(id));
}

ServiceId Scenario::fallback_id() const {
    for (const auto& s : services)
        if (s.is_fallback) return s.id;
    fail("scenario declares no fallback service");
}

bool Scenario::operator==(const Scenario& other) const {
    return network == other.network && services == other.services &&
           travelers == other.travelers &&
           planner.omega1 == other.planner.omega1 &&
           planner.omega2 == other.planner.omega2 &&
           planner.equity_gmax == other.planner.equity_gmax &&
           planner.co_traveler_penalty == other.planner.co_traveler_penalty;
}

void Scenario::validate() const {
    if (network.nodes.empty()) fail("network declares no nodes");
    {
        std::set<NodeId> seen;
        for (const auto& n : network.nodes)
            if (!seen.insert(n).second) fail("duplicate node '" + n + "'");
    }

    if (services.empty()) fail("scenario declares no services");
    std::set<ServiceId> service_ids;
    int fallback_count = 0;
    for (const auto& s : services) {
        const std::string tag = "service " + std::to_string(s.id);
        if (!service_ids.insert(s.id).second) fail("duplicate " + tag);
        if (s.capacity <= 0) fail(tag + ": capacity must be a positive integer");
        if (s.per_traveler_cost <= 0.0) fail(tag + ": per-traveler cost must be > 0");
        if (s.congestion_slope < 0.0) fail(tag + ": congestion slope must be >= 0");
        if (s.is_fallback) ++fallback_count;
    }
    if (fallback_count != 1) fail("scenario must declare exactly one fallback service");

    for (const auto& l : network.links) {
        if (!network.has_node(l.from))
            fail("link references undeclared node '" + l.from + "'");
        if (!network.has_node(l.to))
            fail("link references undeclared node '" + l.to + "'");
        if (!service_ids.count(l.service))
            fail("link references undeclared service " + std::to_string(l.service));
        if (l.travel_time <= 0.0) fail("link travel time must be > 0");
    }

    if (travelers.empty()) fail("scenario declares no travelers");
    const int population = static_cast<int>(travelers.size());
    const auto& fb = service(fallback_id());
    if (fb.capacity < population)
        fail("fallback service " + std::to_string(fb.id) +
             ": capacity must cover all " + std::to_string(population) + " travelers");

    std::set<TravelerId> traveler_ids;
    for (const auto& t : travelers) {
        const std::string tag = traveler_tag(t);
        if (!traveler_ids.insert(t.id).second) fail("duplicate " + tag);
        if (!network.has_node(t.origin))
            fail(tag + ": origin references undeclared node '" + t.origin + "'");
        if (!network.has_node(t.destination))
            fail(tag + ": destination references undeclared node '" + t.destination + "'");
        if (t.origin == t.destination) fail(tag + ": origin equals destination");
        if (t.max_willingness_to_pay <= 0.0) fail(tag + ": willingness-to-pay must be > 0");
        if (t.discount_rate <= 0.0 || t.discount_rate >= 1.0)
            fail(tag + ": discount rate must lie strictly inside (0, 1)");
        if (t.preferences.preferred_travel_time < 0.0)
            fail(tag + ": preferred travel time must be >= 0");
        for (const auto& s : services) {
            const int eta = t.preferences.max_co_travelers_for(s.id);
            const double delta = t.preferences.value_of_time_for(s.id);
            if (eta < 0)
                fail(tag + ": co-traveler tolerance for service " +
                     std::to_string(s.id) + " must be >= 0");
            if (delta < 0.0 || delta > 1.0)
                fail(tag + ": value-of-time for service " + std::to_string(s.id) +
                     " must lie in [0, 1]");
        }
        // Participation must beat the operating cost of every service the
        // traveler could actually use, fallback included.
        for (ServiceId sid : feasible_services(t, *this)) {
            const auto& s = service(sid);
            if (t.max_willingness_to_pay <= s.per_traveler_cost)
                fail(tag + ": willingness-to-pay must exceed the operating cost of every "
                     "feasible service (violated for service " + std::to_string(sid) + ")");
        }
    }

    if (planner.omega1 < 0.0 || planner.omega2 < 0.0 ||
        planner.omega1 + planner.omega2 <= 0.0)
        fail("planner weights must be non-negative with omega1 + omega2 > 0");
    if (planner.equity_gmax < 0.0 || planner.equity_gmax > 1.0)
        fail("planner equity bound must lie in [0, 1]");
    if (planner.co_traveler_penalty < 0.0)
        fail("planner co-traveler penalty must be >= 0");
}

SubclassPartition partition_subclasses(const std::vector<Traveler>& travelers) {
    if (travelers.empty()) fail("cannot partition an empty traveler list");

    std::map<std::pair<NodeId, NodeId>, std::vector<TravelerId>> groups;
    for (const auto& t : travelers)
        groups[{t.origin, t.destination}].push_back(t.id);

    SubclassPartition out;
    out.subclasses.reserve(groups.size());
    for (auto& [od, members] : groups) {
        std::sort(members.begin(), members.end());
        out.subclasses.push_back(std::move(members));
    }
    std::sort(out.subclasses.begin(), out.subclasses.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

double base_travel_time(const Scenario& scenario, ServiceId service,
                        const NodeId& origin, const NodeId& destination) {
    const bool fallback = scenario.service(service).is_fallback;

    std::map<NodeId, int> index;
    for (std::size_t i = 0; i < scenario.network.nodes.size(); ++i)
        index[scenario.network.nodes[i]] = static_cast<int>(i);
    const auto src = index.find(origin);
    const auto dst = index.find(destination);
    if (src == index.end() || dst == index.end())
        fail("travel-time query references undeclared node");

    const int n = static_cast<int>(scenario.network.nodes.size());
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const auto& l : scenario.network.links) {
        if (!fallback && l.service != service) continue;
        const int a = index.at(l.from);
        const int b = index.at(l.to);
        adj[a].push_back({b, l.travel_time});
        adj[b].push_back({a, l.travel_time});
    }

    std::vector<double> dist(n, kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[src->second] = 0.0;
    queue.push({0.0, src->second});
    while (!queue.empty()) {
        auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[u]) continue;
        for (auto [v, w] : adj[u]) {
            if (dist[u] + w < dist[v]) {
                dist[v] = dist[u] + w;
                queue.push({dist[v], v});
            }
        }
    }
    return dist[dst->second];
}

std::vector<ServiceId> feasible_services(const Traveler& traveler, const Scenario& scenario) {
    std::vector<ServiceId> out;
    for (const auto& s : scenario.services) {
        const double tau = base_travel_time(scenario, s.id, traveler.origin, traveler.destination);
        if (tau < kInf) out.push_back(s.id);
    }
    std::sort(out.begin(), out.end());
    if (out.empty() ||
        std::none_of(out.begin(), out.end(), [&](ServiceId id) {
            return scenario.service(id).is_fallback;
        }))
        fail(traveler_tag(traveler) +
             ": no service (not even the fallback) connects its origin-destination pair");
    return out;
}

}  // namespace mobility::network
