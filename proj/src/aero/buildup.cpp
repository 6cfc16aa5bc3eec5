#include <vdt/aero/buildup.hpp>

#include <vdt/common/errors.hpp>
#include <vdt/vehicle/dynamics.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace vdt::aero {

namespace {

Lookup lookup2(const AeroTable& table, double a, double b) {
    const std::array<double, 2> coords{a, b};
    return interpolate(table, coords);
}

constexpr double kSpeedOfSound = 340.29;

} // namespace

Buildup coefficient_buildup(const AeroDatabase& db, const FlightCondition& cond) {
    Buildup out;
    out.baseline_only = !(cond.airspeed > 0.0);
    const double b = db.geometry.wingspan;
    const double c = db.geometry.mean_chord;

    for (Coefficient coef : kAllCoefficients) {
        const auto& ct = db[coef];
        Lookup base = lookup2(ct.baseline, cond.alpha, cond.beta);
        double value = base.value;
        out.extrapolated = out.extrapolated || base.extrapolated;

        if (!out.baseline_only) {
            const double two_v = 2.0 * cond.airspeed;
            for (const auto& [rate, table] : ct.rate_increments) {
                double omega = 0.0;
                double length = b;
                if (rate == "p") {
                    omega = cond.p;
                } else if (rate == "q") {
                    omega = cond.q;
                    length = c;
                } else {
                    omega = cond.r;
                }
                if (omega == 0.0) {
                    continue;
                }
                Lookup inc = lookup2(table, cond.alpha, omega);
                out.extrapolated = out.extrapolated || inc.extrapolated;
                value += inc.value * (length * omega) / two_v;
            }
        }
        for (const auto& [surface, table] : ct.control_increments) {
            auto it = cond.deflections.find(surface);
            if (it == cond.deflections.end() || it->second == 0.0) {
                continue;
            }
            Lookup inc = lookup2(table, cond.alpha, it->second);
            out.extrapolated = out.extrapolated || inc.extrapolated;
            value += inc.value * deg2rad(it->second);
        }
        out.coefficients[coef] = value;
    }
    return out;
}

Mat3 wind_to_body(double alpha, double beta) {
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double cb = std::cos(beta), sb = std::sin(beta);
    Mat3 C;
    C << ca * cb, -ca * sb, -sa,
        sb, cb, 0.0,
        sa * cb, -sa * sb, ca;
    return C;
}

vehicle::ForcesMoments coefficients_to_forces(const CoefficientSet& k, const FlightCondition& cond,
                                              const vehicle::VehicleParams& params) {
    const double qbar = 0.5 * cond.air_density * cond.airspeed * cond.airspeed;
    if (qbar == 0.0) {
        return {};
    }
    const double qs = qbar * params.wing_area;
    const Vec3 wind_force{-k.CD * qs, k.CY * qs, -k.CL * qs};
    const Vec3 body_force = wind_to_body(deg2rad(cond.alpha), deg2rad(cond.beta)) * wind_force;
    const Vec3 moment{k.Cl * qs * params.wingspan, k.Cm * qs * params.mean_chord, k.Cn * qs * params.wingspan};
    return vehicle::ForcesMoments::from(body_force, moment);
}

FlightCondition flight_condition_from_state(const vehicle::BodyState& s, const Vec3& wind_ned,
                                            double air_density) {
    const Mat3 R = vehicle::body_to_ned_rotation(s.phi, s.theta, s.psi);
    const Vec3 rel = s.velocity_body() - R.transpose() * wind_ned;
    FlightCondition fc;
    fc.airspeed = rel.norm();
    fc.air_density = air_density;
    fc.mach = fc.airspeed / kSpeedOfSound;
    fc.p = s.p;
    fc.q = s.q;
    fc.r = s.r;
    if (fc.airspeed > 0.0) {
        fc.alpha = rad2deg(std::atan2(rel.z(), rel.x()));
        fc.beta = rad2deg(std::asin(std::clamp(rel.y() / fc.airspeed, -1.0, 1.0)));
    }
    return fc;
}

} // namespace vdt::aero
