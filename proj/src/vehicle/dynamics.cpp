#include <vdt/vehicle/dynamics.hpp>

#include <vdt/common/errors.hpp>

#include <Eigen/Cholesky>

#include <cmath>
#include <string>

namespace vdt::vehicle {

Mat3 body_to_ned_rotation(double phi, double theta, double psi) {
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    const double cth = std::cos(theta), sth = std::sin(theta);
    const double cpsi = std::cos(psi), spsi = std::sin(psi);
    Mat3 R;
    R << cth * cpsi, sphi * sth * cpsi - cphi * spsi, cphi * sth * cpsi + sphi * spsi,
        cth * spsi, sphi * sth * spsi + cphi * cpsi, cphi * sth * spsi - sphi * cpsi,
        -sth, sphi * cth, cphi * cth;
    return R;
}

Vec3 body_to_ned(const BodyState& s) {
    return body_to_ned_rotation(s.phi, s.theta, s.psi) * s.velocity_body();
}

Vec3 rotational_acceleration(const Vec3& omega, const Vec3& moment, const VehicleParams& params) {
    const Mat3 I = params.inertia_tensor();
    const Vec3 rhs = moment - omega.cross(I * omega);
    return I.llt().solve(rhs);
}

BodyStateDerivative state_derivative(const BodyState& s, const ForcesMoments& fm,
                                     const VehicleParams& params) {
    if (std::abs(s.theta) >= kPi / 2.0 - kGimbalLockMargin) {
        throw GimbalLockError("pitch attitude " + std::to_string(s.theta) +
                              " rad is at the Euler singularity");
    }
    const double g = params.gravity;
    const double m = params.mass;
    const double sphi = std::sin(s.phi), cphi = std::cos(s.phi);
    const double sth = std::sin(s.theta), cth = std::cos(s.theta);

    BodyStateDerivative d;
    d.u_dot = s.r * s.v - s.q * s.w - g * sth + fm.Fx / m;
    d.v_dot = s.p * s.w - s.r * s.u + g * sphi * cth + fm.Fy / m;
    d.w_dot = s.q * s.u - s.p * s.v + g * cphi * cth + fm.Fz / m;

    const Vec3 omega_dot = rotational_acceleration(s.rates(), fm.moment(), params);
    d.p_dot = omega_dot.x();
    d.q_dot = omega_dot.y();
    d.r_dot = omega_dot.z();

    const double tth = sth / cth;
    d.phi_dot = s.p + (s.q * sphi + s.r * cphi) * tth;
    d.theta_dot = s.q * cphi - s.r * sphi;
    d.psi_dot = (s.q * sphi + s.r * cphi) / cth;

    const Vec3 ned = body_to_ned(s);
    d.n_dot = ned.x();
    d.e_dot = ned.y();
    d.d_dot = ned.z();
    return d;
}

} // namespace vdt::vehicle
