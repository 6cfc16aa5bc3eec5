#include <vdt/d2p/clamp.hpp>

#include <algorithm>
#include <cmath>

namespace vdt::d2p {

namespace {

// Rescaling can land a few ulp above the limit; treat that as on the limit so
// clamping is idempotent.
constexpr double kRelSlack = 1e-12;

} // namespace

ClampResult clamp_setpoint(const sim::Setpoint& sp, double limit) {
    ClampResult out{sp, false};
    Vec3& v = out.setpoint.velocity;
    const double h = std::hypot(v.x(), v.y());
    if (h > limit * (1.0 + kRelSlack)) {
        v.x() *= limit / h;
        v.y() *= limit / h;
        out.clamped = true;
    }
    if (std::abs(v.z()) > limit) {
        v.z() = std::clamp(v.z(), -limit, limit);
        out.clamped = true;
    }
    return out;
}

bool within_limit(const sim::Setpoint& sp, double limit, double tol) {
    const Vec3& v = sp.velocity;
    return std::hypot(v.x(), v.y()) <= limit + tol && std::abs(v.z()) <= limit + tol;
}

} // namespace vdt::d2p
