#pragma once

#include <vdt/common/math.hpp>

#include <nlohmann/json_fwd.hpp>

#include <filesystem>

namespace vdt::vehicle {

/// Mass, inertia and reference geometry of the airframe. Defaults describe the
/// scaled demonstrator airframe.
///
/// Products of inertia follow the flight-mechanics sign convention: the
/// inertia tensor carries -Ixz (and -Ixy, -Iyz) off the diagonal.
struct VehicleParams {
    double mass = 11.828;                 // kg
    double gravity = kStandardGravity;    // m/s^2
    double Ixx = 0.7816;                  // kg m^2
    double Iyy = 2.073;
    double Izz = 1.423;
    double Ixz = -0.1564;
    double Ixy = 0.0;
    double Iyz = 0.0;
    double wing_area = 0.8544;            // m^2
    double wingspan = 2.0;                // m
    double mean_chord = 0.2995;           // m
    double cruise_speed = 25.0;           // m/s

    Mat3 inertia_tensor() const;

    /// Throws ArgumentError if mass/inertia are non-positive or the tensor is
    /// not symmetric positive definite.
    void validate() const;
};

void to_json(nlohmann::json& j, const VehicleParams& p);
void from_json(const nlohmann::json& j, VehicleParams& p);

/// Reads a JSON document; missing fields keep their defaults.
VehicleParams load_vehicle_params(const std::filesystem::path& path);

} // namespace vdt::vehicle
