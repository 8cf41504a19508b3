#include "mobility/results.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mobility::cli {

using nlohmann::json;

nlohmann::json RunManifest::to_json() const {
    json overrides_json = json::object();
    for (const auto& [key, value] : overrides) overrides_json[key] = value;
    return json{{"command", command},
                {"input_path", input_path},
                {"master_seed", master_seed},
                {"overrides", overrides_json},
                {"tool_version", tool_version},
                {"input_hash", input_hash}};
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file '" + path.string() + "'");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
    auto dir = path.parent_path();
    if (dir.empty()) dir = ".";
    const auto tmp = dir / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write to '" + tmp.string() + "'");
        out << bytes;
        out.flush();
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

std::string format_outcome_table(const market::MarketOutcome& outcome) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%10s %8s %12s %12s %12s %12s\n", "traveler", "service",
                  "travel-time", "inconv", "payment", "utility");
    out << line;
    for (const auto& row : outcome.per_traveler) {
        std::snprintf(line, sizeof line, "%10d %8d %12.4f %12.4f %12.4f %12.4f\n", row.id,
                      row.service, row.experienced_travel_time, row.inconvenience,
                      row.payment, row.utility);
        out << line;
    }
    return out.str();
}

json outcome_to_json(const market::MarketOutcome& outcome) {
    json rows = json::array();
    for (const auto& row : outcome.per_traveler)
        rows.push_back({{"traveler", row.id},
                        {"service", row.service},
                        {"co_travelers", row.co_travelers},
                        {"experienced_travel_time", row.experienced_travel_time},
                        {"inconvenience", row.inconvenience},
                        {"valuation", row.valuation},
                        {"payment", row.payment},
                        {"utility", row.utility}});
    json costs = json::object();
    for (const auto& [sid, cost] : outcome.per_service_cost)
        costs[std::to_string(sid)] = cost;
    return json{{"per_traveler", rows},
                {"per_service_cost", costs},
                {"objective", outcome.objective},
                {"welfare", outcome.welfare},
                {"equity_gini", market::equity_gini(outcome)}};
}

json solve_result_to_json(const solver::SolveResult& result) {
    json out{{"status", result.status == solver::SolveStatus::optimal ? "optimal"
                                                                      : "infeasible"},
             {"explored_nodes", result.explored_nodes},
             {"root_lower_bound", result.root_lower_bound}};
    if (result.status == solver::SolveStatus::optimal) {
        out["objective"] = result.objective;
        json assignment = json::object();
        for (std::size_t i = 0; i < result.assignment.travelers.size(); ++i)
            assignment[std::to_string(result.assignment.travelers[i])] =
                result.assignment.services[i];
        out["assignment"] = assignment;
    }
    return out;
}

json payments_to_json(const mechanism::PaymentResult& payments) {
    json out = json::array();
    for (const auto& item : payments.items)
        out.push_back({{"traveler", item.id},
                       {"service", item.service},
                       {"payment", item.payment},
                       {"operating_share", item.operating_share},
                       {"welfare_without", item.welfare_without},
                       {"others_welfare_at_optimum", item.others_welfare_at_optimum},
                       {"floored", item.floored}});
    return out;
}

std::string property_name(mechanism::MechanismProperty property) {
    switch (property) {
        case mechanism::MechanismProperty::incentive_compatibility: return "ic";
        case mechanism::MechanismProperty::individual_rationality: return "ir";
        case mechanism::MechanismProperty::weak_budget_balance: return "wbb";
    }
    return "?";
}

json report_to_json(const mechanism::PropertyReport& report) {
    json witnesses = json::array();
    for (const auto& w : report.witnesses)
        witnesses.push_back({{"traveler", w.traveler},
                             {"description", w.description},
                             {"utility_gain", w.utility_gain}});
    json out{{"property", property_name(report.property)},
             {"verdict", report.verdict()},
             {"instances_tested", report.instances_tested},
             {"witnesses", witnesses}};
    if (report.property == mechanism::MechanismProperty::weak_budget_balance)
        out["aggregate_surplus"] = report.aggregate_surplus;
    return out;
}

}  // namespace mobility::cli
