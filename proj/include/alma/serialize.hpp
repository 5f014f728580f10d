#pragma once

// JSON mappings for the documents the CLI reads and writes. Every document
// carries a "version" field.

#include <json.hpp>

#include "alma/classifier.hpp"
#include "alma/cycles.hpp"
#include "alma/migration.hpp"
#include "alma/orchestrator.hpp"
#include "alma/report.hpp"

namespace alma {

inline constexpr int kModelVersion = 1;
inline constexpr int kReportVersion = 1;

void to_json(nlohmann::json& j, const NBModel& model);
void from_json(const nlohmann::json& j, NBModel& model);

void to_json(nlohmann::json& j, const CycleProfile& profile);
void from_json(const nlohmann::json& j, CycleProfile& profile);

void to_json(nlohmann::json& j, const MigrationParams& params);
void to_json(nlohmann::json& j, const MigrationBounds& b);
void from_json(const nlohmann::json& j, MigrationBounds& b);
void to_json(nlohmann::json& j, const MigrationOutcome& outcome);
void from_json(const nlohmann::json& j, MigrationOutcome& outcome);

void to_json(nlohmann::json& j, const MigrationRequest& request);
void from_json(const nlohmann::json& j, MigrationRequest& request);
void to_json(nlohmann::json& j, const Decision& decision);
void from_json(const nlohmann::json& j, Decision& decision);
void to_json(nlohmann::json& j, const MigrationRecord& record);
void from_json(const nlohmann::json& j, MigrationRecord& record);
void to_json(nlohmann::json& j, const VmTimeline& timeline);
void from_json(const nlohmann::json& j, VmTimeline& timeline);
void to_json(nlohmann::json& j, const ScenarioReport& report);
void from_json(const nlohmann::json& j, ScenarioReport& report);

void to_json(nlohmann::json& j, const ReductionTable& table);

/// Pretty-printed report; identical reports give identical bytes.
std::string dump_report(const ScenarioReport& report);
ScenarioReport load_report(const std::string& path);

}  // namespace alma
