#include "mobility/scenario_json.hpp"

#include <fstream>
#include <set>

namespace mobility::network {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ParseError(where + ": unknown key '" + it.key() + "'");
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing key '" + key + "'");
    return *it;
}

double as_number(const json& value, const std::string& where) {
    if (!value.is_number()) throw ParseError(where + ": expected a number");
    return value.get<double>();
}

int as_int(const json& value, const std::string& where) {
    if (!value.is_number_integer()) throw ParseError(where + ": expected an integer");
    return value.get<int>();
}

std::string as_string(const json& value, const std::string& where) {
    if (!value.is_string()) throw ParseError(where + ": expected a string");
    return value.get<std::string>();
}

// A per-service preference field is either one scalar applied to every
// declared service or an object keyed by service id.
template <typename T, typename Parse>
std::map<ServiceId, T> per_service_map(const json& value,
                                       const std::vector<MobilityService>& services,
                                       const std::string& where, Parse parse) {
    std::map<ServiceId, T> out;
    if (value.is_object()) {
        for (auto it = value.begin(); it != value.end(); ++it) {
            ServiceId sid = 0;
            try {
                sid = std::stoi(it.key());
            } catch (const std::exception&) {
                throw ParseError(where + ": keys must be service ids, got '" + it.key() + "'");
            }
            out[sid] = parse(it.value(), where + "[" + it.key() + "]");
        }
        for (const auto& s : services)
            if (!out.count(s.id))
                throw ParseError(where + ": missing entry for service " + std::to_string(s.id));
    } else {
        const T scalar = parse(value, where);
        for (const auto& s : services) out[s.id] = scalar;
    }
    return out;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
    if (!doc.is_object()) throw ParseError("scenario: expected a JSON object");
    reject_unknown_keys(doc, {"nodes", "links", "services", "travelers", "planner"},
                        "scenario");

    Scenario scenario;

    for (const auto& n : require(doc, "nodes", "scenario"))
        scenario.network.nodes.push_back(as_string(n, "nodes[]"));

    for (const auto& s : require(doc, "services", "scenario")) {
        reject_unknown_keys(
            s, {"id", "capacity", "per_traveler_cost", "congestion_slope", "fallback"},
            "services[]");
        MobilityService service;
        service.id = as_int(require(s, "id", "services[]"), "services[].id");
        const std::string where = "service " + std::to_string(service.id);
        service.capacity = as_int(require(s, "capacity", where), where + ".capacity");
        service.per_traveler_cost =
            as_number(require(s, "per_traveler_cost", where), where + ".per_traveler_cost");
        service.congestion_slope =
            as_number(require(s, "congestion_slope", where), where + ".congestion_slope");
        if (s.contains("fallback")) {
            if (!s["fallback"].is_boolean())
                throw ParseError(where + ".fallback: expected a boolean");
            service.is_fallback = s["fallback"].get<bool>();
        }
        scenario.services.push_back(service);
    }
    std::sort(scenario.services.begin(), scenario.services.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });

    for (const auto& l : require(doc, "links", "scenario")) {
        reject_unknown_keys(l, {"from", "to", "service", "travel_time"}, "links[]");
        Link link;
        link.from = as_string(require(l, "from", "links[]"), "links[].from");
        link.to = as_string(require(l, "to", "links[]"), "links[].to");
        link.service = as_int(require(l, "service", "links[]"), "links[].service");
        link.travel_time =
            as_number(require(l, "travel_time", "links[]"), "links[].travel_time");
        scenario.network.links.push_back(link);
    }

    for (const auto& t : require(doc, "travelers", "scenario")) {
        reject_unknown_keys(t,
                            {"id", "origin", "destination", "preferences",
                             "max_willingness_to_pay", "discount_rate"},
                            "travelers[]");
        Traveler traveler;
        traveler.id = as_int(require(t, "id", "travelers[]"), "travelers[].id");
        const std::string where = "traveler " + std::to_string(traveler.id);
        traveler.origin = as_string(require(t, "origin", where), where + ".origin");
        traveler.destination =
            as_string(require(t, "destination", where), where + ".destination");
        traveler.max_willingness_to_pay = as_number(
            require(t, "max_willingness_to_pay", where), where + ".max_willingness_to_pay");
        traveler.discount_rate =
            as_number(require(t, "discount_rate", where), where + ".discount_rate");

        const json& prefs = require(t, "preferences", where);
        reject_unknown_keys(
            prefs, {"preferred_travel_time", "max_co_travelers", "value_of_time"},
            where + ".preferences");
        traveler.preferences.preferred_travel_time =
            as_number(require(prefs, "preferred_travel_time", where),
                      where + ".preferences.preferred_travel_time");
        traveler.preferences.max_co_travelers = per_service_map<int>(
            require(prefs, "max_co_travelers", where), scenario.services,
            where + ".preferences.max_co_travelers", as_int);
        traveler.preferences.value_of_time = per_service_map<double>(
            require(prefs, "value_of_time", where), scenario.services,
            where + ".preferences.value_of_time", as_number);
        scenario.travelers.push_back(traveler);
    }
    std::sort(scenario.travelers.begin(), scenario.travelers.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });

    const json& planner = require(doc, "planner", "scenario");
    reject_unknown_keys(planner,
                        {"omega1", "omega2", "equity_gmax", "co_traveler_penalty"},
                        "planner");
    scenario.planner.omega1 = as_number(require(planner, "omega1", "planner"), "planner.omega1");
    scenario.planner.omega2 = as_number(require(planner, "omega2", "planner"), "planner.omega2");
    scenario.planner.equity_gmax =
        as_number(require(planner, "equity_gmax", "planner"), "planner.equity_gmax");
    scenario.planner.co_traveler_penalty = as_number(
        require(planner, "co_traveler_penalty", "planner"), "planner.co_traveler_penalty");

    scenario.validate();
    return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("scenario file '" + path.string() + "': " + e.what());
    }
    return parse_scenario(doc);
}

json serialize_scenario(const Scenario& scenario) {
    json doc;
    doc["nodes"] = scenario.network.nodes;

    doc["links"] = json::array();
    for (const auto& l : scenario.network.links)
        doc["links"].push_back({{"from", l.from},
                                {"to", l.to},
                                {"service", l.service},
                                {"travel_time", l.travel_time}});

    doc["services"] = json::array();
    for (const auto& s : scenario.services)
        doc["services"].push_back({{"id", s.id},
                                   {"capacity", s.capacity},
                                   {"per_traveler_cost", s.per_traveler_cost},
                                   {"congestion_slope", s.congestion_slope},
                                   {"fallback", s.is_fallback}});

    doc["travelers"] = json::array();
    for (const auto& t : scenario.travelers) {
        json prefs;
        prefs["preferred_travel_time"] = t.preferences.preferred_travel_time;
        json eta = json::object();
        for (const auto& [sid, v] : t.preferences.max_co_travelers)
            eta[std::to_string(sid)] = v;
        json delta = json::object();
        for (const auto& [sid, v] : t.preferences.value_of_time)
            delta[std::to_string(sid)] = v;
        prefs["max_co_travelers"] = eta;
        prefs["value_of_time"] = delta;
        doc["travelers"].push_back({{"id", t.id},
                                    {"origin", t.origin},
                                    {"destination", t.destination},
                                    {"preferences", prefs},
                                    {"max_willingness_to_pay", t.max_willingness_to_pay},
                                    {"discount_rate", t.discount_rate}});
    }

    doc["planner"] = {{"omega1", scenario.planner.omega1},
                      {"omega2", scenario.planner.omega2},
                      {"equity_gmax", scenario.planner.equity_gmax},
                      {"co_traveler_penalty", scenario.planner.co_traveler_penalty}};
    return doc;
}

}  // namespace mobility::network
