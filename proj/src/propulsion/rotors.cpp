#include <vdt/propulsion/rotors.hpp>

#include <vdt/common/errors.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <string>

namespace vdt::propulsion {

RotorGeometry RotorGeometry::symmetric_default() {
    RotorGeometry g;
    constexpr double arm = 0.3;
    g.rotors[0] = {Vec3(arm, arm, 0.0), true, 1, 0.02};     // front right
    g.rotors[1] = {Vec3(-arm, -arm, 0.0), false, 1, 0.02};  // rear left
    g.rotors[2] = {Vec3(arm, -arm, 0.0), true, -1, 0.02};   // front left
    g.rotors[3] = {Vec3(-arm, arm, 0.0), false, -1, 0.02};  // rear right
    return g;
}

void RotorGeometry::validate() const {
    for (std::size_t i = 0; i < rotors.size(); ++i) {
        const auto& r = rotors[i];
        if (!r.position.allFinite()) {
            throw ArgumentError("rotor " + std::to_string(i) + " position is not finite");
        }
        if (r.spin_direction != 1 && r.spin_direction != -1) {
            throw ArgumentError("rotor " + std::to_string(i) + " spin_direction must be +1 or -1");
        }
        if (!std::isfinite(r.torque_coefficient) || r.torque_coefficient < 0.0) {
            throw ArgumentError("rotor " + std::to_string(i) + " torque_coefficient must be >= 0");
        }
    }
}

RotorGeometry load_rotor_geometry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw LoadError("cannot open rotor geometry " + path.string());
    }
    RotorGeometry g = RotorGeometry::symmetric_default();
    try {
        const auto j = nlohmann::json::parse(in);
        const auto& list = j.at("rotors");
        if (list.size() != kRotorCount) {
            throw LoadError(path.string() + ": expected exactly 4 rotors");
        }
        for (std::size_t i = 0; i < kRotorCount; ++i) {
            const auto& r = list.at(i);
            const auto pos = r.at("position").get<std::array<double, 3>>();
            g.rotors[i].position = Vec3(pos[0], pos[1], pos[2]);
            g.rotors[i].tiltable = r.value("tiltable", false);
            g.rotors[i].spin_direction = r.value("spin_direction", 1);
            g.rotors[i].torque_coefficient = r.value("torque_coefficient", 0.02);
        }
        g.validate();
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(path.string() + ": " + e.what());
    } catch (const ArgumentError& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
    return g;
}

PropulsionCommand::PropulsionCommand(const std::array<double, kRotorCount>& throttles, double tilt_deg)
    : throttles_(throttles), tilt_deg_(tilt_deg) {
    for (double t : throttles_) {
        if (!(t >= 0.0 && t <= 1.0)) {
            throw DomainError("throttle " + std::to_string(t) + " outside [0, 1]");
        }
    }
    if (!(tilt_deg >= 0.0 && tilt_deg <= 90.0)) {
        throw DomainError("tilt " + std::to_string(tilt_deg) + " deg outside [0, 90]");
    }
}

Vec3 thrust_direction(const RotorSpec& rotor, double tilt_deg) {
    if (!rotor.tiltable) {
        return {0.0, 0.0, -1.0};
    }
    if (tilt_deg == 90.0) {
        return {0.0, 0.0, -1.0};
    }
    if (tilt_deg == 0.0) {
        return {1.0, 0.0, 0.0};
    }
    const double t = deg2rad(tilt_deg);
    return {std::cos(t), 0.0, -std::sin(t)};
}

double axial_inflow(const vehicle::BodyState& state, const Vec3& direction) {
    return std::max(0.0, state.velocity_body().dot(direction));
}

vehicle::ForcesMoments rotor_wrench(const RotorSpec& rotor, const Vec3& direction, double thrust) {
    const Vec3 force = thrust * direction;
    const Vec3 moment =
        rotor.position.cross(force) + rotor.spin_direction * rotor.torque_coefficient * thrust * direction;
    return vehicle::ForcesMoments::from(force, moment);
}

std::array<double, kRotorCount> rotor_thrusts(const PropulsionCommand& cmd, const vehicle::BodyState& state,
                                              const RotorGeometry& geom, const ThrustCurve& curve) {
    std::array<double, kRotorCount> out{};
    for (std::size_t i = 0; i < kRotorCount; ++i) {
        const Vec3 dir = thrust_direction(geom.rotors[i], cmd.tilt_deg());
        const double available = std::max(0.0, curve.max_thrust(axial_inflow(state, dir)));
        out[i] = cmd.throttles()[i] * available;
    }
    return out;
}

vehicle::ForcesMoments rotor_forces(const PropulsionCommand& cmd, const vehicle::BodyState& state,
                                    const RotorGeometry& geom, const ThrustCurve& curve) {
    const auto thrusts = rotor_thrusts(cmd, state, geom, curve);
    vehicle::ForcesMoments total;
    for (std::size_t i = 0; i < kRotorCount; ++i) {
        total += rotor_wrench(geom.rotors[i], thrust_direction(geom.rotors[i], cmd.tilt_deg()), thrusts[i]);
    }
    return total;
}

} // namespace vdt::propulsion
