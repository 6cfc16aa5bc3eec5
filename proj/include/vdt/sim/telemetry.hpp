#pragma once

#include <vdt/sim/simulator.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace vdt::sim {

nlohmann::json setpoint_to_json(const Setpoint& sp);
Setpoint setpoint_from_json(const nlohmann::json& j);

nlohmann::json state_to_json(const vehicle::BodyState& s);

/// One JSON object per record: time, full state, mode, active setpoint,
/// command, aero and rotor loads.
nlohmann::json record_to_json(const TelemetryRecord& r);

void write_jsonl(std::ostream& out, const TelemetryRecord& r);
void write_jsonl(const std::filesystem::path& file, const std::vector<TelemetryRecord>& log);

} // namespace vdt::sim
