#include <vdt/sim/setpoint.hpp>

#include <cmath>

namespace vdt::sim {

bool Setpoint::well_formed() const {
    if (frame != kFrameLocalNed || (type_mask & mask::kForceSetpoint)) {
        return false;
    }
    return (type_mask & mask::kIgnoreAll) != mask::kIgnoreAll;
}

bool Setpoint::finite() const {
    for (int k = 0; k < 3; ++k) {
        if ((uses_position(k) && !std::isfinite(position[k])) || (uses_velocity(k) && !std::isfinite(velocity[k])) ||
            (uses_acceleration(k) && !std::isfinite(acceleration[k]))) {
            return false;
        }
    }
    return (!uses_yaw() || std::isfinite(yaw)) && (!uses_yaw_rate() || std::isfinite(yaw_rate));
}

Setpoint Setpoint::position_target(const Vec3& pos, double yaw, std::uint32_t t_ms) {
    Setpoint sp;
    sp.type_mask = mask::kIgnoreVelocity | mask::kIgnoreAcceleration | mask::kIgnoreYawRate;
    sp.position = pos;
    sp.yaw = yaw;
    sp.timestamp_ms = t_ms;
    return sp;
}

Setpoint Setpoint::velocity_target(const Vec3& vel, double yaw, std::uint32_t t_ms) {
    Setpoint sp;
    sp.type_mask = mask::kIgnorePosition | mask::kIgnoreAcceleration | mask::kIgnoreYawRate;
    sp.velocity = vel;
    sp.yaw = yaw;
    sp.timestamp_ms = t_ms;
    return sp;
}

Setpoint Setpoint::velocity_only(const Vec3& vel, std::uint32_t t_ms) {
    Setpoint sp = velocity_target(vel, 0.0, t_ms);
    sp.type_mask |= mask::kIgnoreYaw;
    return sp;
}

} // namespace vdt::sim
