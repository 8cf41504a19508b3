#include "mobility/team_json.hpp"

#include <fstream>
#include <set>

namespace mobility::coordination {

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

std::vector<std::string> string_list(const json& value, const std::string& where) {
    if (!value.is_array()) throw ParseError(where + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& v : value) {
        if (!v.is_string()) throw ParseError(where + ": expected an array of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

Distribution distribution(const json& value, const std::string& where) {
    reject_unknown_keys(value, {"probabilities"}, where);
    Distribution out;
    for (const auto& p : require(value, "probabilities", where)) {
        if (!p.is_number()) throw ParseError(where + ": probabilities must be numbers");
        out.probabilities.push_back(p.get<double>());
    }
    return out;
}

std::vector<std::vector<int>> int_table(const json& value, const std::string& where) {
    std::vector<std::vector<int>> out;
    if (!value.is_array()) throw ParseError(where + ": expected a table");
    for (const auto& row : value) {
        if (!row.is_array()) throw ParseError(where + ": expected a table");
        std::vector<int> r;
        for (const auto& cell : row) {
            if (!cell.is_number_integer()) throw ParseError(where + ": expected integers");
            r.push_back(cell.get<int>());
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

TeamModel parse_team_model(const json& doc) {
    if (!doc.is_object()) throw ParseError("team model: expected a JSON object");
    reject_unknown_keys(doc,
                        {"states", "horizon", "members", "disturbance", "dynamics", "cost",
                         "initial", "collision_states"},
                        "team model");

    TeamModel model;
    model.states = string_list(require(doc, "states", "team model"), "states");
    const json& horizon = require(doc, "horizon", "team model");
    if (!horizon.is_number_integer()) throw ParseError("horizon: expected an integer");
    model.horizon = horizon.get<int>();

    for (const auto& m : require(doc, "members", "team model")) {
        reject_unknown_keys(
            m, {"name", "delay", "actions", "observations", "noise", "observation_table"},
            "members[]");
        MemberSpec member;
        member.name = require(m, "name", "members[]").get<std::string>();
        const std::string where = "member " + member.name;
        const json& delay = require(m, "delay", where);
        if (!delay.is_number_integer()) throw ParseError(where + ".delay: expected an integer");
        member.delay = delay.get<int>();
        member.actions = string_list(require(m, "actions", where), where + ".actions");
        member.observations =
            string_list(require(m, "observations", where), where + ".observations");
        member.noise = distribution(require(m, "noise", where), where + ".noise");
        member.observation_table =
            int_table(require(m, "observation_table", where), where + ".observation_table");
        model.members.push_back(std::move(member));
    }

    model.disturbance = distribution(require(doc, "disturbance", "team model"), "disturbance");

    const json& dynamics = require(doc, "dynamics", "team model");
    if (!dynamics.is_array()) throw ParseError("dynamics: expected a table per state");
    for (const auto& per_state : dynamics)
        model.dynamics.push_back(int_table(per_state, "dynamics"));

    const json& cost = require(doc, "cost", "team model");
    if (!cost.is_array()) throw ParseError("cost: expected a table");
    for (const auto& row : cost) {
        if (!row.is_array()) throw ParseError("cost: expected a table");
        std::vector<double> r;
        for (const auto& cell : row) {
            if (!cell.is_number()) throw ParseError("cost: expected numbers");
            r.push_back(cell.get<double>());
        }
        model.cost.push_back(std::move(r));
    }

    model.initial = distribution(require(doc, "initial", "team model"), "initial");
    if (doc.contains("collision_states"))
        model.collision_states = string_list(doc["collision_states"], "collision_states");

    model.validate();
    return model;
}

TeamModel load_team_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open team model file '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("team model file '" + path.string() + "': " + e.what());
    }
    return parse_team_model(doc);
}

nlohmann::json serialize_team_model(const TeamModel& model) {
    json doc;
    doc["states"] = model.states;
    doc["horizon"] = model.horizon;
    doc["members"] = json::array();
    for (const auto& m : model.members)
        doc["members"].push_back({{"name", m.name},
                                  {"delay", m.delay},
                                  {"actions", m.actions},
                                  {"observations", m.observations},
                                  {"noise", {{"probabilities", m.noise.probabilities}}},
                                  {"observation_table", m.observation_table}});
    doc["disturbance"] = {{"probabilities", model.disturbance.probabilities}};
    doc["dynamics"] = model.dynamics;
    doc["cost"] = model.cost;
    doc["initial"] = {{"probabilities", model.initial.probabilities}};
    if (!model.collision_states.empty()) doc["collision_states"] = model.collision_states;
    return doc;
}

}  // namespace mobility::coordination
