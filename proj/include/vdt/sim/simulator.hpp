#pragma once

#include <vdt/aero/buildup.hpp>
#include <vdt/aero/database.hpp>
#include <vdt/propulsion/rotors.hpp>
#include <vdt/propulsion/thrust_curve.hpp>
#include <vdt/sim/controller.hpp>
#include <vdt/sim/setpoint.hpp>
#include <vdt/vehicle/flight_mode.hpp>
#include <vdt/vehicle/params.hpp>
#include <vdt/vehicle/state.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace vdt::sim {

enum class Integrator { RK4, Euler };

struct SimConfig {
    double dt = 0.004;  // s
    Integrator integrator = Integrator::RK4;
    double air_density = aero::kSeaLevelDensity;
    Vec3 wind = Vec3::Zero();  // NED air-mass velocity, m/s
    std::uint64_t seed = 0;
    double aero_min_airspeed = 0.5;  // below this no aerodynamic loads are applied

    /// Throws ArgumentError unless 0 < dt <= 0.02 and density > 0.
    void validate() const;
};

enum class ControlSource {
    Offboard,  // cascade controller tracks the active setpoint
    Scripted,  // propulsion command and surface deflections applied as given
};

/// Everything known about one tick, for logs and the gateway.
struct TelemetryRecord {
    double t = 0.0;
    vehicle::BodyState state;
    vehicle::FlightMode mode = vehicle::FlightMode::VTOL;
    ControlSource source = ControlSource::Offboard;
    std::optional<Setpoint> setpoint;
    propulsion::PropulsionCommand command;
    vehicle::ForcesMoments aero;
    vehicle::ForcesMoments propulsion;
    double airspeed = 0.0;
    double alpha_deg = 0.0;
    double beta_deg = 0.0;
    bool aero_extrapolated = false;
};

/// One twin: vehicle dynamics integrated under aerodynamic and rotor loads.
/// The propulsion command is held constant over each step.
class Simulator {
public:
    /// `db` may be null: no aerodynamic loads.
    Simulator(vehicle::VehicleParams params, std::shared_ptr<const aero::AeroDatabase> db,
              propulsion::RotorGeometry geometry, propulsion::ThrustCurve curve, SimConfig cfg = {},
              ControllerGains gains = {});

    void reset(const vehicle::BodyState& state, double t = 0.0);

    /// Switches to offboard control. Returns false (and keeps the previous
    /// setpoint) if the setpoint is malformed or not finite.
    bool set_setpoint(const Setpoint& sp);
    /// Switches to scripted control.
    void set_scripted(const propulsion::PropulsionCommand& cmd, std::map<std::string, double> deflections = {});

    /// Advances one dt. Throws GimbalLockError from the dynamics.
    void step();

    double time() const { return t_; }
    const vehicle::BodyState& state() const { return state_; }
    const propulsion::PropulsionCommand& command() const { return command_; }
    const std::optional<Setpoint>& active_setpoint() const { return setpoint_; }
    ControlSource source() const { return source_; }
    const SimConfig& config() const { return cfg_; }
    const vehicle::VehicleParams& params() const { return params_; }
    const CascadeController& controller() const { return controller_; }
    CascadeController::Output last_control() const { return last_control_; }
    std::uint64_t rejected_setpoints() const { return rejected_; }

    /// Loads on a state under the current command.
    vehicle::ForcesMoments aero_loads(const vehicle::BodyState& s, aero::Buildup* buildup = nullptr) const;
    vehicle::ForcesMoments total_loads(const vehicle::BodyState& s) const;

    TelemetryRecord telemetry() const;

private:
    vehicle::VehicleParams params_;
    std::shared_ptr<const aero::AeroDatabase> db_;
    propulsion::RotorGeometry geometry_;
    propulsion::ThrustCurve curve_;
    SimConfig cfg_;
    CascadeController controller_;
    CascadeController::Output last_control_;

    vehicle::BodyState state_;
    double t_ = 0.0;
    ControlSource source_ = ControlSource::Offboard;
    std::optional<Setpoint> setpoint_;
    propulsion::PropulsionCommand command_;
    std::map<std::string, double> deflections_;
    std::uint64_t rejected_ = 0;
    std::pair<double, double> alpha_hull_{-90.0, 90.0};
    std::pair<double, double> beta_hull_{-90.0, 90.0};
};

std::string_view to_string(ControlSource s);

} // namespace vdt::sim
