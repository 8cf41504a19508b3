#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "mobility/market.hpp"
#include "mobility/mechanism.hpp"
#include "mobility/solver.hpp"

namespace mobility::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kResultsSchema = "mobility-results/1";

/// Everything that determines a run's output. Identical manifests produce
/// byte-identical results files; execution details (worker count, output
/// paths) are deliberately excluded.
struct RunManifest {
    std::string command;
    std::string input_path;
    std::uint64_t master_seed = 0;
    std::map<std::string, std::string> overrides;  // canonical flag -> value text
    std::string tool_version = kToolVersion;
    std::string input_hash;  // "fnv1a64:<hex>" of the input file bytes

    nlohmann::json to_json() const;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

std::string read_file(const std::filesystem::path& path);

/// Writes via a temp file in the target directory plus rename, so readers
/// never observe a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& bytes);

/// Aligned per-traveler table (traveler, service, travel time,
/// inconvenience, payment, utility) for one subclass outcome.
std::string format_outcome_table(const market::MarketOutcome& outcome);

nlohmann::json outcome_to_json(const market::MarketOutcome& outcome);
nlohmann::json solve_result_to_json(const solver::SolveResult& result);
nlohmann::json payments_to_json(const mechanism::PaymentResult& payments);
nlohmann::json report_to_json(const mechanism::PropertyReport& report);

std::string property_name(mechanism::MechanismProperty property);

}  // namespace mobility::cli
