#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vdt/common/errors.hpp>
#include <vdt/vehicle/dynamics.hpp>
#include <vdt/vehicle/flight_mode.hpp>
#include <vdt/vehicle/params.hpp>

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <random>

using namespace vdt;
using namespace vdt::vehicle;

namespace {

// Independent oracle: explicit adjugate inverse of the 3x3 inertia tensor and
// a hand-written cross product; no Eigen solver involved.
std::array<double, 3> oracle_omega_dot(const VehicleParams& P, std::array<double, 3> w, std::array<double, 3> M) {
    const double a[3][3] = {{P.Ixx, -P.Ixy, -P.Ixz}, {-P.Ixy, P.Iyy, -P.Iyz}, {-P.Ixz, -P.Iyz, P.Izz}};
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    double inv[3][3];
    inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
    inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    inv[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
    inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    inv[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
    inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
    double h[3];
    for (int i = 0; i < 3; ++i) {
        h[i] = a[i][0] * w[0] + a[i][1] * w[1] + a[i][2] * w[2];
    }
    const double rhs[3] = {M[0] - (w[1] * h[2] - w[2] * h[1]), M[1] - (w[2] * h[0] - w[0] * h[2]),
                           M[2] - (w[0] * h[1] - w[1] * h[0])};
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
        out[i] = inv[i][0] * rhs[0] + inv[i][1] * rhs[1] + inv[i][2] * rhs[2];
    }
    return out;
}

} // namespace

TEST_CASE("default parameters describe the demonstrator airframe") {
    VehicleParams p;
    CHECK(p.mass == 11.828);
    CHECK(p.Ixx == 0.7816);
    CHECK(p.Iyy == 2.073);
    CHECK(p.Izz == 1.423);
    CHECK(p.Ixz == -0.1564);
    CHECK(p.Ixy == 0.0);
    CHECK(p.Iyz == 0.0);
    CHECK(p.wingspan == 2.0);
    CHECK(p.wing_area == 0.8544);
    CHECK(p.mean_chord == 0.2995);
    CHECK(p.cruise_speed == 25.0);
    CHECK_NOTHROW(p.validate());
    const Mat3 I = p.inertia_tensor();
    CHECK(I(0, 2) == 0.1564);
    CHECK(I(2, 0) == I(0, 2));
}

TEST_CASE("parameter validation rejects non-physical inertia") {
    VehicleParams p;
    p.Ixz = 2.0;  // Ixx*Izz < Ixz^2
    CHECK_THROWS_AS(p.validate(), ArgumentError);
    p = {};
    p.mass = 0.0;
    CHECK_THROWS_AS(p.validate(), ArgumentError);
}

TEST_CASE("parameters round-trip through JSON") {
    VehicleParams p;
    p.mass = 12.5;
    const nlohmann::json j = p;
    const auto q = j.get<VehicleParams>();
    CHECK(q.mass == 12.5);
    CHECK(q.Ixz == p.Ixz);
}

TEST_CASE("hover trim gives zero derivatives") {
    VehicleParams P;
    BodyState s;
    ForcesMoments fm{0, 0, -P.mass * P.gravity, 0, 0, 0};
    const auto d = state_derivative(s, fm, P).to_vector();
    CHECK(d.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("gravity-only accelerates down the body z axis") {
    VehicleParams P;
    const auto d = state_derivative(BodyState{}, ForcesMoments{}, P);
    CHECK(d.u_dot == 0.0);
    CHECK(d.v_dot == 0.0);
    CHECK(d.w_dot == doctest::Approx(kStandardGravity));
}

TEST_CASE("w-row uses the standard -p*v coupling") {
    VehicleParams P;
    BodyState s;
    s.p = 0.5;
    s.v = 2.0;
    ForcesMoments fm{0, 0, -P.mass * P.gravity, 0, 0, 0};
    CHECK(state_derivative(s, fm, P).w_dot == doctest::Approx(-1.0));
}

TEST_CASE("rotational dynamics match the matrix oracle on random inputs") {
    VehicleParams P;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rate(-3.0, 3.0), mom(-20.0, 20.0), ang(-1.2, 1.2), vel(-30, 30);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        BodyState s{vel(rng), vel(rng), vel(rng), rate(rng), rate(rng), rate(rng), ang(rng), ang(rng), ang(rng), 0, 0, 0};
        ForcesMoments fm{mom(rng), mom(rng), mom(rng), mom(rng), mom(rng), mom(rng)};
        const auto d = state_derivative(s, fm, P);
        const auto o = oracle_omega_dot(P, {s.p, s.q, s.r}, {fm.L_mom, fm.M_mom, fm.N_mom});
        const double got[3] = {d.p_dot, d.q_dot, d.r_dot};
        for (int k = 0; k < 3; ++k) {
            worst = std::max(worst, std::abs(got[k] - o[k]) / std::max(1.0, std::abs(o[k])));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("with Ixz = 0 roll and yaw decouple") {
    VehicleParams P;
    P.Ixz = 0.0;
    const Vec3 w(0.3, -0.7, 1.1);
    const Vec3 M(2.0, -1.0, 0.5);
    const Vec3 wd = rotational_acceleration(w, M, P);
    CHECK(std::abs(wd.x() - ((P.Iyy - P.Izz) * w.y() * w.z() + M.x()) / P.Ixx) < 1e-12);
    CHECK(std::abs(wd.y() - ((P.Izz - P.Ixx) * w.x() * w.z() + M.y()) / P.Iyy) < 1e-12);
    CHECK(std::abs(wd.z() - ((P.Ixx - P.Iyy) * w.x() * w.y() + M.z()) / P.Izz) < 1e-12);
}

TEST_CASE("coupled roll/yaw matches the Gamma-coefficient closed form") {
    VehicleParams P;
    const double Ixx = P.Ixx, Iyy = P.Iyy, Izz = P.Izz, Ixz = P.Ixz;
    const double G = Ixx * Izz - Ixz * Ixz;
    const Vec3 w(0.4, 0.9, -0.6);
    const Vec3 M(1.5, 0.0, -2.5);
    const double p = w.x(), q = w.y(), r = w.z();
    const double pdot = (Izz * (M.x() + (Iyy - Izz) * q * r + Ixz * p * q) +
                         Ixz * (M.z() + (Ixx - Iyy) * p * q - Ixz * q * r)) / G;
    const double rdot = (Ixz * (M.x() + (Iyy - Izz) * q * r + Ixz * p * q) +
                         Ixx * (M.z() + (Ixx - Iyy) * p * q - Ixz * q * r)) / G;
    const double qdot = ((Izz - Ixx) * p * r - Ixz * (p * p - r * r) + M.y()) / Iyy;
    const Vec3 wd = rotational_acceleration(w, M, P);
    CHECK(wd.x() == doctest::Approx(pdot).epsilon(1e-12));
    CHECK(wd.y() == doctest::Approx(qdot).epsilon(1e-12));
    CHECK(wd.z() == doctest::Approx(rdot).epsilon(1e-12));
}

TEST_CASE("gimbal lock is an explicit failure") {
    BodyState s;
    s.theta = kPi / 2.0;
    CHECK_THROWS_AS(state_derivative(s, ForcesMoments{}, VehicleParams{}), GimbalLockError);
    s.theta = -kPi / 2.0 + 1e-6;
    CHECK_THROWS_AS(state_derivative(s, ForcesMoments{}, VehicleParams{}), GimbalLockError);
}

TEST_CASE("torque-free tumbling conserves energy and angular momentum") {
    VehicleParams P;
    const Mat3 I = P.inertia_tensor();
    Vec3 w(0.8, -0.4, 1.3);
    const double e0 = 0.5 * w.dot(I * w);
    const double h0 = (I * w).norm();
    const double dt = 1e-3;
    const Vec3 zero = Vec3::Zero();
    for (int i = 0; i < 10000; ++i) {
        const Vec3 k1 = rotational_acceleration(w, zero, P);
        const Vec3 k2 = rotational_acceleration(w + 0.5 * dt * k1, zero, P);
        const Vec3 k3 = rotational_acceleration(w + 0.5 * dt * k2, zero, P);
        const Vec3 k4 = rotational_acceleration(w + dt * k3, zero, P);
        w += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    CHECK(std::abs(0.5 * w.dot(I * w) - e0) / e0 < 1e-6);
    CHECK(std::abs((I * w).norm() - h0) / h0 < 1e-6);
}

TEST_CASE("body to NED rotation") {
    BodyState s;
    s.u = 1.0;
    CHECK((body_to_ned(s) - Vec3(1, 0, 0)).norm() < 1e-15);
    s.psi = kPi / 2.0;
    CHECK((body_to_ned(s) - Vec3(0, 1, 0)).norm() < 1e-15);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(-3.1, 3.1), pitch(-1.5, 1.5), v(-20, 20);
    for (int i = 0; i < 200; ++i) {
        BodyState r{v(rng), v(rng), v(rng), 0, 0, 0, ang(rng), pitch(rng), ang(rng), 0, 0, 0};
        CHECK(body_to_ned(r).norm() == doctest::Approx(r.velocity_body().norm()).epsilon(1e-12));
        const Mat3 R = body_to_ned_rotation(r.phi, r.theta, r.psi);
        CHECK((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("flight mode classification") {
    CHECK(flight_mode(90.0) == FlightMode::VTOL);
    CHECK(flight_mode(0.0) == FlightMode::Cruise);
    CHECK(flight_mode(45.0) == FlightMode::Transition);
    CHECK(flight_mode(1e-9) == FlightMode::Transition);
    CHECK_THROWS_AS(flight_mode(-0.1), DomainError);
    CHECK_THROWS_AS(flight_mode(90.5), DomainError);
    CHECK(to_string(FlightMode::Cruise) == "Cruise");
}

TEST_CASE("angle normalization") {
    BodyState s;
    s.phi = 3.5 * kPi;
    s.psi = -kPi;
    s.normalize_angles();
    CHECK(s.phi == doctest::Approx(-0.5 * kPi));
    CHECK(s.psi == doctest::Approx(kPi));
}
