#include <vdt/sim/simulator.hpp>

#include <vdt/common/errors.hpp>
#include <vdt/vehicle/dynamics.hpp>

#include <algorithm>
#include <cmath>

namespace vdt::sim {

using vehicle::BodyState;
using vehicle::ForcesMoments;

void SimConfig::validate() const {
    if (!(dt > 0.0 && dt <= 0.02)) {
        throw ArgumentError("simulation dt must lie in (0, 0.02] s");
    }
    if (!(air_density > 0.0) || !wind.allFinite() || !(aero_min_airspeed >= 0.0)) {
        throw ArgumentError("air density must be positive and wind finite");
    }
}

std::string_view to_string(ControlSource s) {
    return s == ControlSource::Offboard ? "offboard" : "scripted";
}

Simulator::Simulator(vehicle::VehicleParams params, std::shared_ptr<const aero::AeroDatabase> db,
                     propulsion::RotorGeometry geometry, propulsion::ThrustCurve curve, SimConfig cfg,
                     ControllerGains gains)
    : params_(std::move(params)),
      db_(std::move(db)),
      geometry_(geometry),
      curve_(curve),
      cfg_(cfg),
      controller_(params_, geometry_, curve_, gains) {
    cfg_.validate();
    if (db_) {
        db_->validate();
        // Clean-configuration lookups are kept inside the tabulated
        // (alpha, beta) hull; the buildup's linear extension is not trusted
        // far outside it (e.g. vertical descent at alpha = 90 deg).
        for (aero::Coefficient c : aero::kAllCoefficients) {
            const auto& t = (*db_)[c].baseline;
            const auto& a = t.axis_grids[t.axis_index("alpha")];
            const auto& b = t.axis_grids[t.axis_index("beta")];
            alpha_hull_ = {std::max(alpha_hull_.first, a.front()), std::min(alpha_hull_.second, a.back())};
            beta_hull_ = {std::max(beta_hull_.first, b.front()), std::min(beta_hull_.second, b.back())};
        }
    }
}

void Simulator::reset(const BodyState& state, double t) {
    state_ = state;
    t_ = t;
    controller_.reset();
    last_control_ = {};
    setpoint_.reset();
    source_ = ControlSource::Offboard;
    command_ = propulsion::PropulsionCommand();
    deflections_.clear();
}

bool Simulator::set_setpoint(const Setpoint& sp) {
    if (!sp.well_formed() || !sp.finite()) {
        ++rejected_;
        return false;
    }
    setpoint_ = sp;
    source_ = ControlSource::Offboard;
    return true;
}

void Simulator::set_scripted(const propulsion::PropulsionCommand& cmd, std::map<std::string, double> deflections) {
    source_ = ControlSource::Scripted;
    command_ = cmd;
    deflections_ = std::move(deflections);
}

ForcesMoments Simulator::aero_loads(const BodyState& s, aero::Buildup* buildup) const {
    aero::FlightCondition cond = aero::flight_condition_from_state(s, cfg_.wind, cfg_.air_density);
    if (!db_ || cond.airspeed < cfg_.aero_min_airspeed) {
        if (buildup != nullptr) {
            *buildup = {};
        }
        return {};
    }
    cond.deflections = deflections_;
    aero::FlightCondition lookup = cond;
    lookup.alpha = std::clamp(cond.alpha, alpha_hull_.first, alpha_hull_.second);
    lookup.beta = std::clamp(cond.beta, beta_hull_.first, beta_hull_.second);
    const aero::Buildup b = aero::coefficient_buildup(*db_, lookup);
    if (buildup != nullptr) {
        *buildup = b;
    }
    return aero::coefficients_to_forces(b.coefficients, cond, params_);
}

ForcesMoments Simulator::total_loads(const BodyState& s) const {
    return aero_loads(s) + propulsion::rotor_forces(command_, s, geometry_, curve_);
}

void Simulator::step() {
    const double dt = cfg_.dt;
    if (source_ == ControlSource::Offboard && setpoint_) {
        last_control_ = controller_.update(state_, *setpoint_, dt);
        command_ = last_control_.command;
    }
    const auto f = [&](const vehicle::StateVector& x) {
        const BodyState s = BodyState::from_vector(x);
        return vehicle::state_derivative(s, total_loads(s), params_).to_vector();
    };
    const vehicle::StateVector x0 = state_.to_vector();
    vehicle::StateVector x1;
    if (cfg_.integrator == Integrator::RK4) {
        const vehicle::StateVector k1 = f(x0);
        const vehicle::StateVector k2 = f(x0 + 0.5 * dt * k1);
        const vehicle::StateVector k3 = f(x0 + 0.5 * dt * k2);
        const vehicle::StateVector k4 = f(x0 + dt * k3);
        x1 = x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
        x1 = x0 + dt * f(x0);
    }
    state_ = BodyState::from_vector(x1);
    state_.normalize_angles();
    t_ += dt;
}

TelemetryRecord Simulator::telemetry() const {
    TelemetryRecord r;
    r.t = t_;
    r.state = state_;
    r.mode = vehicle::flight_mode(command_.tilt_deg());
    r.source = source_;
    if (source_ == ControlSource::Offboard) {
        r.setpoint = setpoint_;
    }
    r.command = command_;
    aero::Buildup b;
    r.aero = aero_loads(state_, &b);
    r.aero_extrapolated = b.extrapolated;
    r.propulsion = propulsion::rotor_forces(command_, state_, geometry_, curve_);
    const aero::FlightCondition cond = aero::flight_condition_from_state(state_, cfg_.wind, cfg_.air_density);
    r.airspeed = cond.airspeed;
    r.alpha_deg = cond.alpha;
    r.beta_deg = cond.beta;
    return r;
}

} // namespace vdt::sim
