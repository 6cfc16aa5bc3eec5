#include <vdt/sim/mission.hpp>

#include <vdt/common/errors.hpp>
#include <vdt/sim/telemetry.hpp>

#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>

namespace vdt::sim {

using nlohmann::json;

void MissionProfile::validate() const {
    if (segments.empty()) {
        throw ArgumentError("mission '" + name + "' has no segments");
    }
    if (!initial.finite()) {
        throw ArgumentError("mission '" + name + "' has a non-finite initial state");
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        const std::string where = "mission '" + name + "' segment " + std::to_string(i);
        if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
            throw ArgumentError(where + ": duration must be positive");
        }
        if (!s.target.allFinite() || !std::isfinite(s.yaw)) {
            throw ArgumentError(where + ": target and yaw must be finite");
        }
        if (s.kind == MissionSegment::Kind::Scripted) {
            try {
                propulsion::PropulsionCommand(s.throttles, s.tilt_deg);
            } catch (const DomainError& e) {
                throw ArgumentError(where + ": " + e.what());
            }
        }
    }
}

double MissionProfile::duration() const {
    double total = 0.0;
    for (const auto& s : segments) {
        total += s.duration;
    }
    return total;
}

MissionProfile MissionProfile::square_pattern(double side, double speed, double altitude) {
    if (!(side > 0.0) || !(speed > 0.0) || !std::isfinite(altitude)) {
        throw ArgumentError("square pattern needs positive side and speed");
    }
    MissionProfile m;
    m.name = "square_pattern";
    m.initial.pos_d = -altitude;
    const Vec3 start(0.0, 0.0, -altitude);
    const std::array<Vec3, 4> dirs{Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-1, 0, 0), Vec3(0, -1, 0)};
    const std::array<double, 4> headings{0.0, kPi / 2.0, kPi, -kPi / 2.0};

    MissionSegment hold;
    hold.kind = MissionSegment::Kind::Waypoint;
    hold.target = start;
    hold.duration = 3.0;
    hold.label = "hover";
    m.segments.push_back(hold);

    Vec3 corner = start;
    for (int k = 0; k < 4; ++k) {
        MissionSegment turn;
        turn.kind = MissionSegment::Kind::Waypoint;
        turn.target = corner;
        turn.yaw = headings[static_cast<std::size_t>(k)];
        turn.duration = 3.0;
        turn.label = "corner " + std::to_string(k) + " yaw";
        m.segments.push_back(turn);

        MissionSegment leg;
        leg.kind = MissionSegment::Kind::Velocity;
        leg.target = speed * dirs[static_cast<std::size_t>(k)];
        leg.yaw = headings[static_cast<std::size_t>(k)];
        leg.duration = side / speed;
        leg.label = "leg " + std::to_string(k);
        m.segments.push_back(leg);
        corner += side * dirs[static_cast<std::size_t>(k)];
    }
    MissionSegment final_hold;
    final_hold.kind = MissionSegment::Kind::Waypoint;
    final_hold.target = start;
    final_hold.yaw = headings[3];
    final_hold.duration = 6.0;
    final_hold.label = "final hold";
    m.segments.push_back(final_hold);
    return m;
}

MissionProfile MissionProfile::cruise_hold(double speed, double altitude, double front_throttle, double duration) {
    MissionProfile m;
    m.name = "cruise_hold";
    m.initial.u = speed;
    m.initial.pos_d = -altitude;
    MissionSegment s;
    s.kind = MissionSegment::Kind::Scripted;
    s.throttles = {front_throttle, 0.0, front_throttle, 0.0};
    s.tilt_deg = 0.0;
    s.duration = duration;
    s.label = "cruise";
    m.segments.push_back(s);
    return m;
}

namespace {

std::string kind_name(MissionSegment::Kind k) {
    switch (k) {
    case MissionSegment::Kind::Waypoint:
        return "waypoint";
    case MissionSegment::Kind::Velocity:
        return "velocity";
    case MissionSegment::Kind::Scripted:
        return "scripted";
    }
    return "waypoint";
}

MissionSegment::Kind kind_from(const std::string& s) {
    if (s == "waypoint") {
        return MissionSegment::Kind::Waypoint;
    }
    if (s == "velocity") {
        return MissionSegment::Kind::Velocity;
    }
    if (s == "scripted") {
        return MissionSegment::Kind::Scripted;
    }
    throw ArgumentError("unknown segment kind '" + s + "'");
}

} // namespace

json mission_to_json(const MissionProfile& m) {
    json segs = json::array();
    for (const auto& s : m.segments) {
        json j{{"kind", kind_name(s.kind)}, {"duration", s.duration}, {"label", s.label}};
        if (s.kind == MissionSegment::Kind::Scripted) {
            j["throttles"] = s.throttles;
            j["tilt_deg"] = s.tilt_deg;
            j["deflections"] = s.deflections;
        } else {
            j["target"] = {s.target.x(), s.target.y(), s.target.z()};
            j["yaw"] = s.yaw;
        }
        segs.push_back(std::move(j));
    }
    return {{"name", m.name}, {"initial", state_to_json(m.initial)}, {"segments", segs}};
}

MissionProfile mission_from_json(const json& j) {
    MissionProfile m;
    m.name = j.value("name", "mission");
    if (j.contains("initial")) {
        const json& s = j["initial"];
        vehicle::StateVector x = m.initial.to_vector();
        const char* keys[] = {"u", "v", "w", "p", "q", "r", "phi", "theta", "psi", "pos_n", "pos_e", "pos_d"};
        for (int i = 0; i < 12; ++i) {
            x[i] = s.value(keys[i], 0.0);
        }
        m.initial = vehicle::BodyState::from_vector(x);
    }
    for (const auto& sj : j.at("segments")) {
        MissionSegment s;
        s.kind = kind_from(sj.value("kind", "waypoint"));
        s.duration = sj.at("duration").get<double>();
        s.label = sj.value("label", "");
        if (s.kind == MissionSegment::Kind::Scripted) {
            s.throttles = sj.at("throttles").get<std::array<double, propulsion::kRotorCount>>();
            s.tilt_deg = sj.value("tilt_deg", 90.0);
            s.deflections = sj.value("deflections", std::map<std::string, double>{});
        } else {
            const auto t = sj.at("target").get<std::vector<double>>();
            if (t.size() != 3) {
                throw ArgumentError("segment target must have 3 entries");
            }
            s.target = Vec3(t[0], t[1], t[2]);
            s.yaw = sj.value("yaw", 0.0);
        }
        m.segments.push_back(std::move(s));
    }
    m.validate();
    return m;
}

MissionProfile load_mission(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw LoadError("cannot open mission file " + path.string());
    }
    try {
        return mission_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw LoadError(path.string() + ": " + e.what());
    } catch (const ArgumentError& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
}

MissionResult run_mission(const MissionProfile& mission, Simulator& sim, int record_every,
                          const std::function<void(const TelemetryRecord&)>& sink) {
    mission.validate();
    if (record_every < 1) {
        throw ArgumentError("record_every must be at least 1");
    }
    MissionResult result;
    sim.reset(mission.initial);
    Vec3 last_commanded = mission.initial.position_ned();
    const auto record = [&] {
        TelemetryRecord r = sim.telemetry();
        if (sink) {
            sink(r);
        }
        result.log.push_back(std::move(r));
    };
    record();
    std::uint64_t tick = 0;
    try {
        for (const auto& seg : mission.segments) {
            const auto t_ms = static_cast<std::uint32_t>(std::llround(sim.time() * 1000.0));
            switch (seg.kind) {
            case MissionSegment::Kind::Waypoint:
                sim.set_setpoint(Setpoint::position_target(seg.target, seg.yaw, t_ms));
                last_commanded = seg.target;
                break;
            case MissionSegment::Kind::Velocity:
                sim.set_setpoint(Setpoint::velocity_target(seg.target, seg.yaw, t_ms));
                break;
            case MissionSegment::Kind::Scripted:
                sim.set_scripted(propulsion::PropulsionCommand(seg.throttles, seg.tilt_deg), seg.deflections);
                break;
            }
            const auto steps = static_cast<std::uint64_t>(std::llround(seg.duration / sim.config().dt));
            for (std::uint64_t i = 0; i < steps; ++i) {
                sim.step();
                if (!sim.state().finite()) {
                    throw Error("state became non-finite at t = " + std::to_string(sim.time()));
                }
                if (++tick % static_cast<std::uint64_t>(record_every) == 0) {
                    record();
                }
            }
        }
        result.completed = true;
    } catch (const Error& e) {
        result.error = e.what();
        spdlog::error("mission '{}' halted at t = {:.3f} s: {}", mission.name, sim.time(), e.what());
    }
    result.final_state = sim.state();
    result.final_position_error = (sim.state().position_ned() - last_commanded).norm();
    result.rejected_setpoints = sim.rejected_setpoints();
    return result;
}

} // namespace vdt::sim
