#pragma once

#include <vdt/aero/database.hpp>
#include <vdt/vehicle/params.hpp>
#include <vdt/vehicle/state.hpp>

#include <map>
#include <string>

namespace vdt::aero {

/// Sea-level standard density, kg/m^3.
inline constexpr double kSeaLevelDensity = 1.225;

struct FlightCondition {
    double alpha = 0.0;     // deg
    double beta = 0.0;      // deg
    double airspeed = 0.0;  // m/s
    double mach = 0.0;
    double p = 0.0, q = 0.0, r = 0.0;  // rad/s
    std::map<std::string, double> deflections;  // surface -> deg
    double air_density = kSeaLevelDensity;
};

struct Buildup {
    CoefficientSet coefficients;
    /// Zero airspeed: rate terms are undefined and were dropped.
    bool baseline_only = false;
    /// Some lookup left its grid.
    bool extrapolated = false;
};

/// Component build-up: clean (alpha, beta) coefficients plus rate
/// derivatives scaled by the nondimensional rates and control increments
/// scaled by deflection in radians. Pitch rate uses c*q/(2V); roll and yaw
/// rates both use b*p/(2V), b*r/(2V).
Buildup coefficient_buildup(const AeroDatabase& db, const FlightCondition& cond);

/// Converts coefficients to body-axis forces and moments at dynamic pressure
/// 0.5*rho*V^2. Lift, drag and side force are rotated from wind to body axes.
vehicle::ForcesMoments coefficients_to_forces(const CoefficientSet& coeffs, const FlightCondition& cond,
                                              const vehicle::VehicleParams& params);

/// Wind-axis to body-axis direction cosines for the given incidence angles
/// (radians).
Mat3 wind_to_body(double alpha_rad, double beta_rad);

/// Air-relative flight condition of a body state. `wind_ned` is the air mass
/// velocity in NED.
FlightCondition flight_condition_from_state(const vehicle::BodyState& state, const Vec3& wind_ned,
                                            double air_density);

} // namespace vdt::aero
