#pragma once

#include <filesystem>

#include <json.hpp>

#include "mobility/team.hpp"

namespace mobility::coordination {

/// Parses and validates a team model document. State, action and
/// observation sets are string lists; the dynamics and observation tables
/// are dense index tables; joint decisions are indexed row-major with the
/// last member fastest. Unknown keys are rejected.
TeamModel parse_team_model(const nlohmann::json& doc);

TeamModel load_team_model(const std::filesystem::path& path);

nlohmann::json serialize_team_model(const TeamModel& model);

}  // namespace mobility::coordination
