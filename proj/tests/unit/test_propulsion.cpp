#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vdt/common/errors.hpp>
#include <vdt/propulsion/rotors.hpp>
#include <vdt/propulsion/thrust_curve.hpp>

#include <Eigen/Dense>

#include <cmath>

using namespace vdt;
using namespace vdt::propulsion;

namespace {

// Oracle: natural cubic spline by solving for all 4(n-1) global polynomial
// coefficients (p_i(x) = a + b x + c x^2 + d x^3 in absolute x) with a dense
// LU. Shares nothing with the tridiagonal implementation.
struct SplineOracle {
    std::vector<double> xs;
    Eigen::VectorXd coef;

    explicit SplineOracle(const std::vector<std::pair<double, double>>& knots) {
        const int n = static_cast<int>(knots.size());
        const int segs = n - 1;
        const int N = 4 * segs;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
        for (const auto& k : knots) {
            xs.push_back(k.first);
        }
        int row = 0;
        auto val = [&](int seg, double x, int r, double scale) {
            A(r, 4 * seg + 0) += scale;
            A(r, 4 * seg + 1) += scale * x;
            A(r, 4 * seg + 2) += scale * x * x;
            A(r, 4 * seg + 3) += scale * x * x * x;
        };
        auto d1 = [&](int seg, double x, int r, double scale) {
            A(r, 4 * seg + 1) += scale;
            A(r, 4 * seg + 2) += scale * 2 * x;
            A(r, 4 * seg + 3) += scale * 3 * x * x;
        };
        auto d2 = [&](int seg, double x, int r, double scale) {
            A(r, 4 * seg + 2) += scale * 2;
            A(r, 4 * seg + 3) += scale * 6 * x;
        };
        for (int s = 0; s < segs; ++s) {
            val(s, knots[s].first, row, 1.0);
            rhs[row++] = knots[s].second;
            val(s, knots[s + 1].first, row, 1.0);
            rhs[row++] = knots[s + 1].second;
        }
        for (int s = 0; s + 1 < segs; ++s) {
            const double x = knots[s + 1].first;
            d1(s, x, row, 1.0);
            d1(s + 1, x, row, -1.0);
            ++row;
            d2(s, x, row, 1.0);
            d2(s + 1, x, row, -1.0);
            ++row;
        }
        d2(0, knots.front().first, row++, 1.0);
        d2(segs - 1, knots.back().first, row++, 1.0);
        coef = A.fullPivLu().solve(rhs);
    }

    double operator()(double x) const {
        int s = 0;
        while (s + 2 < static_cast<int>(xs.size()) && x > xs[s + 1]) {
            ++s;
        }
        return coef[4 * s] + coef[4 * s + 1] * x + coef[4 * s + 2] * x * x + coef[4 * s + 3] * x * x * x;
    }
};

const std::vector<std::pair<double, double>> kWindTunnelKnots{{0, 67.3}, {5, 65.5}, {10, 60.9}, {15, 55.3}, {20, 48.8}};

} // namespace

TEST_CASE("spline reproduces the wind-tunnel knots exactly") {
    const auto curve = ThrustCurve::wind_tunnel_default();
    CHECK(curve.max_thrust(0.0) == 67.3);
    CHECK(curve.max_thrust(5.0) == 65.5);
    CHECK(curve.max_thrust(10.0) == 60.9);
    CHECK(curve.max_thrust(15.0) == 55.3);
    CHECK(curve.max_thrust(20.0) == 48.8);
}

TEST_CASE("spline matches the dense-system oracle") {
    const auto curve = ThrustCurve::wind_tunnel_default();
    const SplineOracle oracle(kWindTunnelKnots);
    CHECK(std::abs(curve.max_thrust(7.5) - oracle(7.5)) < 1e-9);
    CHECK(std::abs(curve.max_thrust(12.5) - oracle(12.5)) < 1e-9);
    for (double v = 0.0; v <= 20.0; v += 0.37) {
        CHECK(std::abs(curve.max_thrust(v) - oracle(v)) < 1e-9);
    }
    // Extrapolation continues the last cubic piece.
    CHECK(std::abs(curve.max_thrust(26.0) - oracle(26.0)) < 1e-9);
}

TEST_CASE("spline is C2 continuous across knots") {
    const auto curve = ThrustCurve::wind_tunnel_default();
    const double h = 1e-4;
    for (double x : {5.0, 10.0, 15.0}) {
        auto f = [&](double v) { return curve.max_thrust(v); };
        const double left1 = (f(x) - f(x - h)) / h, right1 = (f(x + h) - f(x)) / h;
        CHECK(std::abs(left1 - right1) < 1e-3);
        const double left2 = (f(x) - 2 * f(x - h) + f(x - 2 * h)) / (h * h);
        const double right2 = (f(x + 2 * h) - 2 * f(x + h) + f(x)) / (h * h);
        CHECK(std::abs(left2 - right2) < 1e-2);
    }
}

TEST_CASE("default curve is strictly decreasing on [0, 20]") {
    const auto curve = ThrustCurve::wind_tunnel_default();
    double prev = curve.max_thrust(0.0);
    for (int i = 1; i <= 200; ++i) {
        const double t = curve.max_thrust(0.1 * i);
        CHECK(t < prev);
        prev = t;
    }
}

TEST_CASE("thrust curve domain and construction errors") {
    const auto curve = ThrustCurve::wind_tunnel_default();
    CHECK_THROWS_AS(curve.max_thrust(-0.1), DomainError);
    CHECK_FALSE(ThrustCurve::extrapolation_flagged(25.0));
    CHECK(ThrustCurve::extrapolation_flagged(31.0));
    CHECK_THROWS_AS(ThrustCurve({{0, 1}}), ArgumentError);
    CHECK_THROWS_AS(ThrustCurve({{0, 1}, {0, 2}}), ArgumentError);
}

TEST_CASE("hover at full throttle") {
    const auto geom = RotorGeometry::symmetric_default();
    const auto curve = ThrustCurve::wind_tunnel_default();
    const PropulsionCommand cmd({1.0, 1.0, 1.0, 1.0}, 90.0);
    const auto fm = rotor_forces(cmd, vehicle::BodyState{}, geom, curve);
    CHECK(fm.Fz == doctest::Approx(-269.2));
    CHECK(std::abs(fm.Fx) < 1e-12);
    CHECK(std::abs(fm.L_mom) < 1e-12);
    CHECK(std::abs(fm.M_mom) < 1e-12);
    CHECK(std::abs(fm.N_mom) < 1e-12);
}

TEST_CASE("equal throttles on the symmetric layout give no moments") {
    const auto geom = RotorGeometry::symmetric_default();
    const auto curve = ThrustCurve::wind_tunnel_default();
    for (double th : {0.1, 0.43, 0.8}) {
        const auto fm = rotor_forces(PropulsionCommand({th, th, th, th}, 90.0), vehicle::BodyState{}, geom, curve);
        CHECK(std::abs(fm.L_mom) < 1e-12);
        CHECK(std::abs(fm.M_mom) < 1e-12);
        CHECK(std::abs(fm.N_mom) < 1e-12);
    }
}

TEST_CASE("cruise tilt points the front rotors forward") {
    const auto geom = RotorGeometry::symmetric_default();
    const auto curve = ThrustCurve::wind_tunnel_default();
    const auto fm = rotor_forces(PropulsionCommand({0.5, 0.0, 0.5, 0.0}, 0.0), vehicle::BodyState{}, geom, curve);
    CHECK(fm.Fx == doctest::Approx(67.3));
    CHECK(std::abs(fm.Fz) < 1e-12);
}

TEST_CASE("tilt preserves per-rotor thrust magnitude") {
    const auto geom = RotorGeometry::symmetric_default();
    for (double tilt = 0.0; tilt <= 90.0; tilt += 7.5) {
        for (const auto& r : geom.rotors) {
            const auto w = rotor_wrench(r, thrust_direction(r, tilt), 40.0);
            CHECK(std::abs(w.force().norm() - 40.0) < 1e-12);
        }
    }
}

TEST_CASE("forward flight reduces tilted-rotor thrust through inflow") {
    const auto geom = RotorGeometry::symmetric_default();
    const auto curve = ThrustCurve::wind_tunnel_default();
    vehicle::BodyState s;
    s.u = 15.0;
    const auto t = rotor_thrusts(PropulsionCommand({1, 1, 1, 1}, 0.0), s, geom, curve);
    CHECK(t[0] == doctest::Approx(55.3));
    CHECK(t[1] == doctest::Approx(67.3));  // vertical rotor sees no axial inflow
}

TEST_CASE("command ranges are enforced") {
    CHECK_THROWS_AS(PropulsionCommand({1.1, 0, 0, 0}, 90.0), DomainError);
    CHECK_THROWS_AS(PropulsionCommand({0, 0, 0, 0}, 91.0), DomainError);
    CHECK_NOTHROW(PropulsionCommand({0, 1, 0, 1}, 0.0));
}
