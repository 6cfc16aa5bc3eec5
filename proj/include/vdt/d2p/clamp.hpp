#pragma once

#include <vdt/sim/setpoint.hpp>

namespace vdt::d2p {

struct ClampResult {
    sim::Setpoint setpoint;
    bool clamped = false;
};

/// Scales the horizontal velocity (direction preserved) to at most `limit`
/// and clamps the vertical component to +-limit. Every path that forwards a
/// setpoint goes through here.
ClampResult clamp_setpoint(const sim::Setpoint& sp, double limit);

/// True if the velocity already satisfies the clamp (with a float tolerance
/// for values that went through the wire).
bool within_limit(const sim::Setpoint& sp, double limit, double tol = 1e-6);

} // namespace vdt::d2p
