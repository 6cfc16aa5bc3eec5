#pragma once

#include <vdt/common/math.hpp>
#include <vdt/propulsion/thrust_curve.hpp>
#include <vdt/vehicle/state.hpp>

#include <array>
#include <filesystem>

namespace vdt::propulsion {

inline constexpr std::size_t kRotorCount = 4;

struct RotorSpec {
    Vec3 position = Vec3::Zero();  // m, body frame relative to the CG
    bool tiltable = false;
    int spin_direction = 1;          // +1 or -1
    double torque_coefficient = 0.02;  // N m of reaction torque per N of thrust
};

/// Four-rotor layout. The default is a symmetric 0.6 m x 0.6 m square with
/// the two front rotors tilting and diagonal pairs sharing spin direction.
struct RotorGeometry {
    std::array<RotorSpec, kRotorCount> rotors;

    static RotorGeometry symmetric_default();
    void validate() const;
};

RotorGeometry load_rotor_geometry(const std::filesystem::path& path);

/// Actuator command: per-rotor throttle fraction of maximum thrust and
/// front-rotor tilt in degrees (90 vertical, 0 horizontal).
class PropulsionCommand {
public:
    PropulsionCommand() = default;
    /// Throws DomainError if a throttle is outside [0, 1] or tilt outside [0, 90].
    PropulsionCommand(const std::array<double, kRotorCount>& throttles, double tilt_deg);

    const std::array<double, kRotorCount>& throttles() const { return throttles_; }
    double tilt_deg() const { return tilt_deg_; }

    bool operator==(const PropulsionCommand&) const = default;

private:
    std::array<double, kRotorCount> throttles_{};
    double tilt_deg_ = 90.0;
};

/// Unit thrust direction of a rotor in body axes: tiltable rotors rotate
/// from -z (90 deg) to +x (0 deg); fixed rotors always push along -z.
Vec3 thrust_direction(const RotorSpec& rotor, double tilt_deg);

/// Axial inflow speed through a rotor disk: body velocity projected on the
/// thrust axis, floored at zero.
double axial_inflow(const vehicle::BodyState& state, const Vec3& direction);

/// Force and moment produced by one rotor pushing `thrust` N along
/// `direction`: r x F plus the reaction torque about the thrust axis.
vehicle::ForcesMoments rotor_wrench(const RotorSpec& rotor, const Vec3& direction, double thrust);

/// Per-rotor thrust (N) for a command at the current state.
std::array<double, kRotorCount> rotor_thrusts(const PropulsionCommand& cmd, const vehicle::BodyState& state,
                                              const RotorGeometry& geom, const ThrustCurve& curve);

/// Summed body-axis forces and moments of all rotors.
vehicle::ForcesMoments rotor_forces(const PropulsionCommand& cmd, const vehicle::BodyState& state,
                                    const RotorGeometry& geom, const ThrustCurve& curve);

} // namespace vdt::propulsion
