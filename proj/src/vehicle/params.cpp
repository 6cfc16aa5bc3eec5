#include <vdt/vehicle/params.hpp>

#include <vdt/common/errors.hpp>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <fstream>

namespace vdt::vehicle {

Mat3 VehicleParams::inertia_tensor() const {
    Mat3 I;
    I << Ixx, -Ixy, -Ixz,
        -Ixy, Iyy, -Iyz,
        -Ixz, -Iyz, Izz;
    return I;
}

void VehicleParams::validate() const {
    if (!(mass > 0.0)) {
        throw ArgumentError("vehicle mass must be positive");
    }
    if (!(Ixx > 0.0 && Iyy > 0.0 && Izz > 0.0)) {
        throw ArgumentError("principal moments of inertia must be positive");
    }
    if (!(wing_area > 0.0 && wingspan > 0.0 && mean_chord > 0.0)) {
        throw ArgumentError("reference geometry must be positive");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia_tensor(), Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() <= 0.0) {
        throw ArgumentError("inertia tensor is not positive definite");
    }
}

void to_json(nlohmann::json& j, const VehicleParams& p) {
    j = nlohmann::json{{"mass", p.mass},
                       {"gravity", p.gravity},
                       {"Ixx", p.Ixx},
                       {"Iyy", p.Iyy},
                       {"Izz", p.Izz},
                       {"Ixz", p.Ixz},
                       {"Ixy", p.Ixy},
                       {"Iyz", p.Iyz},
                       {"wing_area", p.wing_area},
                       {"wingspan", p.wingspan},
                       {"mean_chord", p.mean_chord},
                       {"cruise_speed", p.cruise_speed}};
}

void from_json(const nlohmann::json& j, VehicleParams& p) {
    VehicleParams d;
    p.mass = j.value("mass", d.mass);
    p.gravity = j.value("gravity", d.gravity);
    p.Ixx = j.value("Ixx", d.Ixx);
    p.Iyy = j.value("Iyy", d.Iyy);
    p.Izz = j.value("Izz", d.Izz);
    p.Ixz = j.value("Ixz", d.Ixz);
    p.Ixy = j.value("Ixy", d.Ixy);
    p.Iyz = j.value("Iyz", d.Iyz);
    p.wing_area = j.value("wing_area", d.wing_area);
    p.wingspan = j.value("wingspan", d.wingspan);
    p.mean_chord = j.value("mean_chord", d.mean_chord);
    p.cruise_speed = j.value("cruise_speed", d.cruise_speed);
}

VehicleParams load_vehicle_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw LoadError("cannot open vehicle parameters: " + path.string());
    }
    VehicleParams params;
    try {
        params = nlohmann::json::parse(in).get<VehicleParams>();
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
    try {
        params.validate();
    } catch (const ArgumentError& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
    return params;
}

} // namespace vdt::vehicle
