#pragma once

#include <vdt/common/math.hpp>

#include <cstdint>

namespace vdt::sim {

/// Ignore bits of the setpoint type mask: a set bit means the member is not
/// used.
namespace mask {
inline constexpr std::uint16_t kIgnorePx = 1u << 0;
inline constexpr std::uint16_t kIgnorePy = 1u << 1;
inline constexpr std::uint16_t kIgnorePz = 1u << 2;
inline constexpr std::uint16_t kIgnoreVx = 1u << 3;
inline constexpr std::uint16_t kIgnoreVy = 1u << 4;
inline constexpr std::uint16_t kIgnoreVz = 1u << 5;
inline constexpr std::uint16_t kIgnoreAx = 1u << 6;
inline constexpr std::uint16_t kIgnoreAy = 1u << 7;
inline constexpr std::uint16_t kIgnoreAz = 1u << 8;
inline constexpr std::uint16_t kForceSetpoint = 1u << 9;  // unsupported, must be clear
inline constexpr std::uint16_t kIgnoreYaw = 1u << 10;
inline constexpr std::uint16_t kIgnoreYawRate = 1u << 11;

inline constexpr std::uint16_t kIgnorePosition = kIgnorePx | kIgnorePy | kIgnorePz;
inline constexpr std::uint16_t kIgnoreVelocity = kIgnoreVx | kIgnoreVy | kIgnoreVz;
inline constexpr std::uint16_t kIgnoreAcceleration = kIgnoreAx | kIgnoreAy | kIgnoreAz;
inline constexpr std::uint16_t kIgnoreAll =
    kIgnorePosition | kIgnoreVelocity | kIgnoreAcceleration | kIgnoreYaw | kIgnoreYawRate;
} // namespace mask

/// Local-NED frame identifier carried on the wire.
inline constexpr std::uint8_t kFrameLocalNed = 1;

/// Offboard target in local NED. Members whose ignore bit is set are not
/// read by consumers.
struct Setpoint {
    std::uint16_t type_mask = mask::kIgnoreAll;
    std::uint8_t frame = kFrameLocalNed;
    Vec3 position = Vec3::Zero();      // m
    Vec3 velocity = Vec3::Zero();      // m/s
    Vec3 acceleration = Vec3::Zero();  // m/s^2
    double yaw = 0.0;                  // rad
    double yaw_rate = 0.0;             // rad/s
    std::uint32_t timestamp_ms = 0;

    bool uses_position(int axis) const { return !(type_mask & (mask::kIgnorePx << axis)); }
    bool uses_velocity(int axis) const { return !(type_mask & (mask::kIgnoreVx << axis)); }
    bool uses_acceleration(int axis) const { return !(type_mask & (mask::kIgnoreAx << axis)); }
    bool uses_yaw() const { return !(type_mask & mask::kIgnoreYaw); }
    bool uses_yaw_rate() const { return !(type_mask & mask::kIgnoreYawRate); }

    /// At least one member group is active, the force flag is clear and the
    /// frame is local NED.
    bool well_formed() const;
    /// Every active member is finite.
    bool finite() const;

    static Setpoint position_target(const Vec3& pos, double yaw, std::uint32_t t_ms = 0);
    static Setpoint velocity_target(const Vec3& vel, double yaw, std::uint32_t t_ms = 0);
    /// Velocity target with yaw left uncommanded.
    static Setpoint velocity_only(const Vec3& vel, std::uint32_t t_ms = 0);

    bool operator==(const Setpoint&) const = default;
};

} // namespace vdt::sim
