#include <vdt/vehicle/state.hpp>

namespace vdt::vehicle {

StateVector BodyState::to_vector() const {
    StateVector x;
    x << u, v, w, p, q, r, phi, theta, psi, pos_n, pos_e, pos_d;
    return x;
}

BodyState BodyState::from_vector(const StateVector& x) {
    return {x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7], x[8], x[9], x[10], x[11]};
}

void BodyState::normalize_angles() {
    phi = wrap_pi(phi);
    psi = wrap_pi(psi);
}

StateVector BodyStateDerivative::to_vector() const {
    StateVector x;
    x << u_dot, v_dot, w_dot, p_dot, q_dot, r_dot, phi_dot, theta_dot, psi_dot, n_dot, e_dot, d_dot;
    return x;
}

} // namespace vdt::vehicle
