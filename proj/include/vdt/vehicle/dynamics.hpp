#pragma once

#include <vdt/vehicle/params.hpp>
#include <vdt/vehicle/state.hpp>

namespace vdt::vehicle {

/// Pitch angles closer than this to +-pi/2 are rejected.
inline constexpr double kGimbalLockMargin = 1e-4;

/// Direction cosine matrix taking body-axis vectors into NED (ZYX Euler).
Mat3 body_to_ned_rotation(double phi, double theta, double psi);

/// Body velocity expressed in NED.
Vec3 body_to_ned(const BodyState& state);

/// Angular acceleration from the rigid-body Euler equations,
/// I * omega_dot = M - omega x (I * omega).
Vec3 rotational_acceleration(const Vec3& omega, const Vec3& moment, const VehicleParams& params);

/// Time derivative of all twelve state components.
///
/// Translational rows are the body-frame Newton equations with the gravity
/// vector resolved through the Euler angles; the w-row uses q*u - p*v.
/// Throws GimbalLockError when |theta| >= pi/2 - kGimbalLockMargin.
BodyStateDerivative state_derivative(const BodyState& state, const ForcesMoments& fm,
                                     const VehicleParams& params);

} // namespace vdt::vehicle
