#include <vdt/sim/controller.hpp>

#include <vdt/common/errors.hpp>
#include <vdt/vehicle/dynamics.hpp>

#include <nlohmann/json.hpp>

#include <Eigen/LU>

#include <cmath>

namespace vdt::sim {

using vehicle::BodyState;

namespace {

Vec3 vec_from_json(const nlohmann::json& j, const char* key, const Vec3& fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const auto v = j.at(key).get<std::vector<double>>();
    if (v.size() != 3) {
        throw ArgumentError(std::string("controller gain '") + key + "' must have 3 entries");
    }
    return {v[0], v[1], v[2]};
}

std::vector<double> to_vec(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

Vec3 vee(const Mat3& S) { return {S(2, 1), S(0, 2), S(1, 0)}; }

} // namespace

void ControllerGains::validate() const {
    for (const Vec3* v : {&pos_p, &vel_p, &vel_i, &att_p, &rate_p, &rate_d}) {
        if (!v->allFinite() || v->minCoeff() < 0.0) {
            throw ArgumentError("controller gains must be finite and non-negative");
        }
    }
    if (!(integrator_limit >= 0.0) || !(max_horizontal_speed > 0.0) || !(max_vertical_speed > 0.0) ||
        !(max_tilt_deg > 0.0 && max_tilt_deg < 90.0) || !(max_yaw_rate > 0.0)) {
        throw ArgumentError("controller limits must be positive (tilt limit below 90 deg)");
    }
}

void to_json(nlohmann::json& j, const ControllerGains& g) {
    j = nlohmann::json{{"pos_p", to_vec(g.pos_p)},
                       {"vel_p", to_vec(g.vel_p)},
                       {"vel_i", to_vec(g.vel_i)},
                       {"integrator_limit", g.integrator_limit},
                       {"max_horizontal_speed", g.max_horizontal_speed},
                       {"max_vertical_speed", g.max_vertical_speed},
                       {"max_tilt_deg", g.max_tilt_deg},
                       {"att_p", to_vec(g.att_p)},
                       {"rate_p", to_vec(g.rate_p)},
                       {"rate_d", to_vec(g.rate_d)},
                       {"max_yaw_rate", g.max_yaw_rate}};
}

void from_json(const nlohmann::json& j, ControllerGains& g) {
    const ControllerGains d;
    g.pos_p = vec_from_json(j, "pos_p", d.pos_p);
    g.vel_p = vec_from_json(j, "vel_p", d.vel_p);
    g.vel_i = vec_from_json(j, "vel_i", d.vel_i);
    g.integrator_limit = j.value("integrator_limit", d.integrator_limit);
    g.max_horizontal_speed = j.value("max_horizontal_speed", d.max_horizontal_speed);
    g.max_vertical_speed = j.value("max_vertical_speed", d.max_vertical_speed);
    g.max_tilt_deg = j.value("max_tilt_deg", d.max_tilt_deg);
    g.att_p = vec_from_json(j, "att_p", d.att_p);
    g.rate_p = vec_from_json(j, "rate_p", d.rate_p);
    g.rate_d = vec_from_json(j, "rate_d", d.rate_d);
    g.max_yaw_rate = j.value("max_yaw_rate", d.max_yaw_rate);
}

Vec3 attitude_error(const Mat3& R, const Mat3& Rd) {
    return 0.5 * vee(Rd.transpose() * R - R.transpose() * Rd);
}

Mat3 attitude_from_thrust(const Vec3& thrust_ned, double yaw) {
    const Vec3 z_b = -thrust_ned.normalized();
    const Vec3 x_c(std::cos(yaw), std::sin(yaw), 0.0);
    Vec3 y_b = z_b.cross(x_c);
    if (y_b.norm() < 1e-9) {
        y_b = z_b.cross(Vec3(-std::sin(yaw), std::cos(yaw), 0.0)).cross(z_b);
    }
    y_b.normalize();
    const Vec3 x_b = y_b.cross(z_b);
    Mat3 Rd;
    Rd.col(0) = x_b;
    Rd.col(1) = y_b;
    Rd.col(2) = z_b;
    return Rd;
}

CascadeController::CascadeController(vehicle::VehicleParams params, propulsion::RotorGeometry geometry,
                                     propulsion::ThrustCurve curve, ControllerGains gains)
    : params_(std::move(params)), geometry_(geometry), curve_(std::move(curve)), gains_(gains) {
    params_.validate();
    geometry_.validate();
    gains_.validate();
    for (std::size_t i = 0; i < propulsion::kRotorCount; ++i) {
        const auto& r = geometry_.rotors[i];
        const auto c = static_cast<Eigen::Index>(i);
        // Unit thrust along body -z at r: moment r x (0,0,-1) = (-y, x, 0),
        // reaction torque -spin * k about z.
        allocation_(0, c) = 1.0;
        allocation_(1, c) = -r.position.y();
        allocation_(2, c) = r.position.x();
        allocation_(3, c) = -r.spin_direction * r.torque_coefficient;
    }
    Eigen::FullPivLU<Eigen::Matrix4d> lu(allocation_);
    if (!lu.isInvertible()) {
        throw ArgumentError("rotor geometry gives a singular allocation matrix");
    }
    allocation_inverse_ = lu.inverse();
}

void CascadeController::reset() {
    integrator_.setZero();
    prev_rate_error_.setZero();
    have_prev_ = false;
}

double CascadeController::hover_throttle() const {
    return params_.mass * params_.gravity / (4.0 * curve_.max_thrust(0.0));
}

CascadeController::Output CascadeController::update(const BodyState& state, const Setpoint& sp, double dt) {
    Output out;
    if (!sp.well_formed() || !sp.finite() || !state.finite()) {
        out.command = last_command_;
        out.rejected = true;
        return out;
    }
    const Mat3 R = vehicle::body_to_ned_rotation(state.phi, state.theta, state.psi);
    const Vec3 pos = state.position_ned();
    const Vec3 vel = R * state.velocity_body();

    // Position loop (per axis, only where position is active).
    Vec3 v_sp = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
        if (sp.uses_position(k)) {
            v_sp[k] = gains_.pos_p[k] * (sp.position[k] - pos[k]);
            if (sp.uses_velocity(k)) {
                v_sp[k] += sp.velocity[k];
            }
        } else if (sp.uses_velocity(k)) {
            v_sp[k] = sp.velocity[k];
        }
    }
    const double h = std::hypot(v_sp.x(), v_sp.y());
    if (h > gains_.max_horizontal_speed) {
        v_sp.x() *= gains_.max_horizontal_speed / h;
        v_sp.y() *= gains_.max_horizontal_speed / h;
    }
    v_sp.z() = std::clamp(v_sp.z(), -gains_.max_vertical_speed, gains_.max_vertical_speed);
    out.velocity_target = v_sp;

    // Velocity PI.
    const Vec3 v_err = v_sp - vel;
    const Vec3 previous_integrator = integrator_;
    integrator_ = (integrator_ + gains_.vel_i.cwiseProduct(v_err) * dt)
                      .cwiseMax(Vec3::Constant(-gains_.integrator_limit))
                      .cwiseMin(Vec3::Constant(gains_.integrator_limit));
    Vec3 a_sp = gains_.vel_p.cwiseProduct(v_err) + integrator_;
    for (int k = 0; k < 3; ++k) {
        if (sp.uses_acceleration(k)) {
            a_sp[k] += sp.acceleration[k];
        }
    }
    out.acceleration_target = a_sp;

    // Thrust vector in NED; keep it pointing up and inside the tilt cone.
    const double g = params_.gravity;
    Vec3 thrust = params_.mass * (a_sp - Vec3(0.0, 0.0, g));
    thrust.z() = std::min(thrust.z(), -0.1 * params_.mass * g);
    const double max_h = -thrust.z() * std::tan(deg2rad(gains_.max_tilt_deg));
    const double th = std::hypot(thrust.x(), thrust.y());
    if (th > max_h) {
        thrust.x() *= max_h / th;
        thrust.y() *= max_h / th;
    }

    double yaw_target = state.psi;
    if (sp.uses_yaw()) {
        yaw_target = sp.yaw;
    }
    const Mat3 Rd = attitude_from_thrust(thrust, yaw_target);
    out.attitude_target = Rd;

    // Attitude and rate loops.
    Vec3 rate_sp = -gains_.att_p.cwiseProduct(attitude_error(R, Rd));
    if (!sp.uses_yaw() && sp.uses_yaw_rate()) {
        rate_sp.z() += sp.yaw_rate;
    }
    rate_sp.z() = std::clamp(rate_sp.z(), -gains_.max_yaw_rate, gains_.max_yaw_rate);
    const Vec3 omega = state.rates();
    const Vec3 rate_err = rate_sp - omega;
    const Vec3 rate_err_dot = have_prev_ && dt > 0.0 ? Vec3((rate_err - prev_rate_error_) / dt) : Vec3::Zero();
    prev_rate_error_ = rate_err;
    have_prev_ = true;
    const Vec3 ang_acc = gains_.rate_p.cwiseProduct(rate_err) + gains_.rate_d.cwiseProduct(rate_err_dot);
    const Mat3 I = params_.inertia_tensor();
    const Vec3 torque = I * ang_acc + omega.cross(I * omega);

    // Collective: thrust vector projected on the current body -z axis.
    const Vec3 body_up = -R.col(2);
    out.collective = std::max(0.0, thrust.dot(body_up));

    // Yaw has the lowest priority: its torque is scaled down until the
    // collective/roll/pitch solution stays inside the throttle range.
    const double inflow = propulsion::axial_inflow(state, Vec3(0.0, 0.0, -1.0));
    const double t_max = curve_.max_thrust(inflow);
    const Eigen::Vector4d base = allocation_inverse_ * Eigen::Vector4d(out.collective, torque.x(), torque.y(), 0.0);
    const Eigen::Vector4d yaw = allocation_inverse_ * Eigen::Vector4d(0.0, 0.0, 0.0, torque.z());
    double yaw_scale = 1.0;
    for (Eigen::Index i = 0; i < 4; ++i) {
        const double lo = std::min(base[i], 0.0);
        const double hi = std::max(base[i], t_max);
        if (yaw[i] > 0.0 && base[i] + yaw[i] > hi) {
            yaw_scale = std::min(yaw_scale, (hi - base[i]) / yaw[i]);
        } else if (yaw[i] < 0.0 && base[i] + yaw[i] < lo) {
            yaw_scale = std::min(yaw_scale, (lo - base[i]) / yaw[i]);
        }
    }
    const Eigen::Vector4d per_rotor = base + std::max(yaw_scale, 0.0) * yaw;
    std::array<double, propulsion::kRotorCount> throttles{};
    for (std::size_t i = 0; i < propulsion::kRotorCount; ++i) {
        const double u = per_rotor[static_cast<Eigen::Index>(i)] / t_max;
        if (u < 0.0 || u > 1.0 || !std::isfinite(u)) {
            out.saturated = true;
        }
        throttles[i] = std::isfinite(u) ? std::clamp(u, 0.0, 1.0) : 0.0;
    }
    if (out.saturated) {
        integrator_ = previous_integrator;
    }
    out.command = propulsion::PropulsionCommand(throttles, 90.0);
    last_command_ = out.command;
    return out;
}

} // namespace vdt::sim
