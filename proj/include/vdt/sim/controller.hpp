#pragma once

#include <vdt/propulsion/rotors.hpp>
#include <vdt/propulsion/thrust_curve.hpp>
#include <vdt/sim/setpoint.hpp>
#include <vdt/vehicle/params.hpp>
#include <vdt/vehicle/state.hpp>

#include <nlohmann/json_fwd.hpp>

namespace vdt::sim {

/// Gains and limits of the multicopter-mode cascade. Defaults are tuned for
/// the default vehicle and rotor layout.
struct ControllerGains {
    Vec3 pos_p{1.0, 1.0, 1.2};         // 1/s
    Vec3 vel_p{2.5, 2.5, 4.0};         // 1/s
    Vec3 vel_i{0.8, 0.8, 1.5};         // 1/s^2
    double integrator_limit = 3.0;     // m/s^2 per axis
    double max_horizontal_speed = 5.0; // m/s, applied to position-loop output
    double max_vertical_speed = 3.0;   // m/s
    double max_tilt_deg = 35.0;
    Vec3 att_p{7.0, 7.0, 2.0};         // 1/s
    Vec3 rate_p{22.0, 22.0, 5.0};     // 1/s
    Vec3 rate_d{0.15, 0.15, 0.0};      // dimensionless
    double max_yaw_rate = 1.0;         // rad/s

    /// Throws ArgumentError on negative gains or non-positive limits.
    void validate() const;
};

void to_json(nlohmann::json& j, const ControllerGains& g);
void from_json(const nlohmann::json& j, ControllerGains& g);

/// Position -> velocity (PI) -> thrust vector -> attitude -> body rates ->
/// rotor throttles, for the rotors in their vertical (VTOL) position.
class CascadeController {
public:
    struct Output {
        propulsion::PropulsionCommand command;
        bool rejected = false;   // setpoint not finite or malformed; previous command held
        bool saturated = false;  // some throttle clipped to [0, 1]
        Vec3 velocity_target = Vec3::Zero();
        Vec3 acceleration_target = Vec3::Zero();
        Mat3 attitude_target = Mat3::Identity();
        double collective = 0.0;  // N
    };

    CascadeController(vehicle::VehicleParams params, propulsion::RotorGeometry geometry,
                      propulsion::ThrustCurve curve, ControllerGains gains = {});

    Output update(const vehicle::BodyState& state, const Setpoint& sp, double dt);

    /// Clears the integrator and derivative memory.
    void reset();

    const Vec3& integrator() const { return integrator_; }
    const ControllerGains& gains() const { return gains_; }
    /// Rows: collective thrust (along -z), roll, pitch, yaw moment; columns:
    /// per-rotor thrust with rotors vertical.
    const Eigen::Matrix4d& allocation() const { return allocation_; }
    /// Throttle that balances the weight with all rotors sharing equally at
    /// zero inflow.
    double hover_throttle() const;

private:
    vehicle::VehicleParams params_;
    propulsion::RotorGeometry geometry_;
    propulsion::ThrustCurve curve_;
    ControllerGains gains_;
    Eigen::Matrix4d allocation_;
    Eigen::Matrix4d allocation_inverse_;
    Vec3 integrator_ = Vec3::Zero();
    Vec3 prev_rate_error_ = Vec3::Zero();
    bool have_prev_ = false;
    propulsion::PropulsionCommand last_command_;
};

/// Rotation-matrix attitude error 0.5 * vee(Rd^T R - R^T Rd).
Vec3 attitude_error(const Mat3& R, const Mat3& Rd);

/// Desired attitude whose body -z axis points along `thrust_ned` with the
/// given heading.
Mat3 attitude_from_thrust(const Vec3& thrust_ned, double yaw);

} // namespace vdt::sim
