#pragma once

#include <array>
#include <filesystem>
#include <utility>
#include <vector>

namespace vdt::propulsion {

/// Maximum rotor thrust against axial inflow speed, interpolated by a natural
/// cubic spline through measured knots.
class ThrustCurve {
public:
    struct Segment {
        double a, b, c, d;  // a + b*h + c*h^2 + d*h^3, h = v - v_i
    };

    /// Wind-tunnel maximum thrust of one propulsion module.
    static ThrustCurve wind_tunnel_default();

    /// Throws ArgumentError unless there are >= 2 knots with strictly
    /// increasing, finite speeds and finite thrusts.
    explicit ThrustCurve(std::vector<std::pair<double, double>> knots);

    /// Maximum thrust (N) at `inflow` m/s. Past the last knot the last
    /// segment's cubic is continued. Throws DomainError for negative inflow.
    double max_thrust(double inflow) const;

    /// True when `inflow` lies beyond the range the extrapolation is trusted
    /// for (30 m/s).
    static bool extrapolation_flagged(double inflow) { return inflow > kTrustedLimit; }

    const std::vector<std::pair<double, double>>& knots() const { return knots_; }
    const std::vector<Segment>& segments() const { return segments_; }

    static constexpr double kTrustedLimit = 30.0;

private:
    std::vector<std::pair<double, double>> knots_;
    std::vector<Segment> segments_;
};

ThrustCurve load_thrust_curve(const std::filesystem::path& path);

} // namespace vdt::propulsion
