#include <vdt/sim/telemetry.hpp>

#include <vdt/common/errors.hpp>

#include <fstream>

namespace vdt::sim {

using nlohmann::json;

namespace {

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw ArgumentError("expected a 3-element array");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json loads(const vehicle::ForcesMoments& fm) { return {{"force", vec(fm.force())}, {"moment", vec(fm.moment())}}; }

} // namespace

json setpoint_to_json(const Setpoint& sp) {
    return {{"type_mask", sp.type_mask},
            {"frame", sp.frame},
            {"position", vec(sp.position)},
            {"velocity", vec(sp.velocity)},
            {"acceleration", vec(sp.acceleration)},
            {"yaw", sp.yaw},
            {"yaw_rate", sp.yaw_rate},
            {"timestamp_ms", sp.timestamp_ms}};
}

Setpoint setpoint_from_json(const json& j) {
    Setpoint sp;
    sp.type_mask = j.value("type_mask", sp.type_mask);
    sp.frame = j.value("frame", sp.frame);
    if (j.contains("position")) {
        sp.position = vec_from(j["position"]);
    }
    if (j.contains("velocity")) {
        sp.velocity = vec_from(j["velocity"]);
    }
    if (j.contains("acceleration")) {
        sp.acceleration = vec_from(j["acceleration"]);
    }
    sp.yaw = j.value("yaw", 0.0);
    sp.yaw_rate = j.value("yaw_rate", 0.0);
    sp.timestamp_ms = j.value("timestamp_ms", 0u);
    return sp;
}

json state_to_json(const vehicle::BodyState& s) {
    return {{"u", s.u},         {"v", s.v},         {"w", s.w},         {"p", s.p},
            {"q", s.q},         {"r", s.r},         {"phi", s.phi},     {"theta", s.theta},
            {"psi", s.psi},     {"pos_n", s.pos_n}, {"pos_e", s.pos_e}, {"pos_d", s.pos_d}};
}

json record_to_json(const TelemetryRecord& r) {
    return {{"t", r.t},
            {"state", state_to_json(r.state)},
            {"mode", std::string(vehicle::to_string(r.mode))},
            {"source", std::string(to_string(r.source))},
            {"setpoint", r.setpoint ? setpoint_to_json(*r.setpoint) : json(nullptr)},
            {"command", {{"throttles", r.command.throttles()}, {"tilt_deg", r.command.tilt_deg()}}},
            {"aero", loads(r.aero)},
            {"propulsion", loads(r.propulsion)},
            {"airspeed", r.airspeed},
            {"alpha_deg", r.alpha_deg},
            {"beta_deg", r.beta_deg},
            {"aero_extrapolated", r.aero_extrapolated}};
}

void write_jsonl(std::ostream& out, const TelemetryRecord& r) {
    out << record_to_json(r).dump() << '\n';
}

void write_jsonl(const std::filesystem::path& file, const std::vector<TelemetryRecord>& log) {
    std::ofstream out(file);
    if (!out) {
        throw Error("cannot write " + file.string());
    }
    for (const auto& r : log) {
        write_jsonl(out, r);
    }
}

} // namespace vdt::sim
