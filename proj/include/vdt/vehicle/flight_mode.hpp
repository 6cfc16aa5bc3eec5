#pragma once

#include <string_view>

namespace vdt::vehicle {

enum class FlightMode { VTOL, Transition, Cruise };

/// Classifies front-rotor tilt (degrees from horizontal): 90 is VTOL, 0 is
/// cruise, anything strictly between is transition. Throws DomainError outside
/// [0, 90].
FlightMode flight_mode(double tilt_deg);

std::string_view to_string(FlightMode mode);

} // namespace vdt::vehicle
