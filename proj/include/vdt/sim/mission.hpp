#pragma once

#include <vdt/sim/simulator.hpp>

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace vdt::sim {

struct MissionSegment {
    enum class Kind {
        Waypoint,  // position target (NED m) held for the duration
        Velocity,  // velocity target (NED m/s) held for the duration
        Scripted,  // open-loop throttles + tilt + surface deflections
    };
    Kind kind = Kind::Waypoint;
    Vec3 target = Vec3::Zero();
    double duration = 1.0;  // s
    double yaw = 0.0;       // rad
    std::array<double, propulsion::kRotorCount> throttles{};
    double tilt_deg = 90.0;
    std::map<std::string, double> deflections;
    std::string label;
};

struct MissionProfile {
    std::string name;
    vehicle::BodyState initial;
    std::vector<MissionSegment> segments;

    /// Throws ArgumentError if empty, a duration is not positive or a
    /// scripted command is out of range.
    void validate() const;
    double duration() const;

    /// Hover at `altitude` (m above the origin), fly a side x side square
    /// clockwise seen from above at `speed`: per corner a yaw-to-heading hold
    /// at the expected corner, then a velocity leg; ends with a hold at the
    /// start point.
    static MissionProfile square_pattern(double side, double speed, double altitude);

    /// Level cruise at `speed` and `altitude` with the front rotors tilted
    /// forward and throttled to `front_throttle`; surfaces neutral.
    static MissionProfile cruise_hold(double speed, double altitude, double front_throttle, double duration);
};

nlohmann::json mission_to_json(const MissionProfile& m);
MissionProfile mission_from_json(const nlohmann::json& j);
/// Throws LoadError naming the file on parse or validation failure.
MissionProfile load_mission(const std::filesystem::path& path);

struct MissionResult {
    std::vector<TelemetryRecord> log;
    bool completed = false;
    std::string error;
    vehicle::BodyState final_state;
    /// Distance from the final state to the last position the mission
    /// commanded (last waypoint, or the initial position if none).
    double final_position_error = 0.0;
    std::uint64_t rejected_setpoints = 0;
};

/// Flies the mission from its initial state. Every `record_every`-th tick is
/// logged (and passed to `sink` when given). A dynamics failure stops the
/// run; the partial log is kept and `error` set.
MissionResult run_mission(const MissionProfile& mission, Simulator& sim, int record_every = 1,
                          const std::function<void(const TelemetryRecord&)>& sink = {});

} // namespace vdt::sim
