#include <vdt/vehicle/flight_mode.hpp>

#include <vdt/common/errors.hpp>

#include <string>

namespace vdt::vehicle {

FlightMode flight_mode(double tilt_deg) {
    if (!(tilt_deg >= 0.0 && tilt_deg <= 90.0)) {
        throw DomainError("tilt angle " + std::to_string(tilt_deg) + " deg outside [0, 90]");
    }
    if (tilt_deg == 90.0) {
        return FlightMode::VTOL;
    }
    if (tilt_deg == 0.0) {
        return FlightMode::Cruise;
    }
    return FlightMode::Transition;
}

std::string_view to_string(FlightMode mode) {
    switch (mode) {
    case FlightMode::VTOL:
        return "VTOL";
    case FlightMode::Transition:
        return "Transition";
    case FlightMode::Cruise:
        return "Cruise";
    }
    return "?";
}

} // namespace vdt::vehicle
