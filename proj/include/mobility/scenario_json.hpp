#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mobility/network.hpp"

namespace mobility::network {

/// Parses and validates a scenario document. See docs/formats.md for the
/// schema; unknown keys are rejected at every level.
Scenario parse_scenario(const nlohmann::json& doc);

/// Reads, parses and validates a scenario file. Throws ParseError for
/// malformed files and ValidationError for invariant violations.
Scenario load_scenario(const std::filesystem::path& path);

/// Inverse of parse_scenario: parse_scenario(serialize_scenario(s)) is
/// structurally identical to s.
nlohmann::json serialize_scenario(const Scenario& scenario);

}  // namespace mobility::network
