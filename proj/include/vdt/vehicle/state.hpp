#pragma once

#include <vdt/common/math.hpp>

#include <Eigen/Core>

namespace vdt::vehicle {

using StateVector = Eigen::Matrix<double, 12, 1>;

/// Rigid-body state of one twin. Velocities and rates in body axes, Euler
/// angles ZYX, position in local NED.
struct BodyState {
    double u = 0, v = 0, w = 0;          // m/s
    double p = 0, q = 0, r = 0;          // rad/s
    double phi = 0, theta = 0, psi = 0;  // rad
    double pos_n = 0, pos_e = 0, pos_d = 0;  // m

    Vec3 velocity_body() const { return {u, v, w}; }
    Vec3 rates() const { return {p, q, r}; }
    Vec3 position_ned() const { return {pos_n, pos_e, pos_d}; }

    StateVector to_vector() const;
    static BodyState from_vector(const StateVector& x);

    bool finite() const { return to_vector().allFinite(); }

    /// Wraps phi and psi into (-pi, pi].
    void normalize_angles();
};

/// Time derivative of every BodyState component, same ordering.
struct BodyStateDerivative {
    double u_dot = 0, v_dot = 0, w_dot = 0;
    double p_dot = 0, q_dot = 0, r_dot = 0;
    double phi_dot = 0, theta_dot = 0, psi_dot = 0;
    double n_dot = 0, e_dot = 0, d_dot = 0;

    StateVector to_vector() const;
};

/// Body-axis forces (N) and moments (N m) about the centre of gravity.
struct ForcesMoments {
    double Fx = 0, Fy = 0, Fz = 0;
    double L_mom = 0, M_mom = 0, N_mom = 0;

    Vec3 force() const { return {Fx, Fy, Fz}; }
    Vec3 moment() const { return {L_mom, M_mom, N_mom}; }
    static ForcesMoments from(const Vec3& f, const Vec3& m) {
        return {f.x(), f.y(), f.z(), m.x(), m.y(), m.z()};
    }

    bool finite() const { return force().allFinite() && moment().allFinite(); }

    ForcesMoments& operator+=(const ForcesMoments& o) {
        Fx += o.Fx; Fy += o.Fy; Fz += o.Fz;
        L_mom += o.L_mom; M_mom += o.M_mom; N_mom += o.N_mom;
        return *this;
    }
    friend ForcesMoments operator+(ForcesMoments a, const ForcesMoments& b) { return a += b; }
};

} // namespace vdt::vehicle
