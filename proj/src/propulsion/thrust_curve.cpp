#include <vdt/propulsion/thrust_curve.hpp>

#include <vdt/common/errors.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace vdt::propulsion {

ThrustCurve ThrustCurve::wind_tunnel_default() {
    return ThrustCurve({{0.0, 67.3}, {5.0, 65.5}, {10.0, 60.9}, {15.0, 55.3}, {20.0, 48.8}});
}

ThrustCurve::ThrustCurve(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
    const std::size_t n = knots_.size();
    if (n < 2) {
        throw ArgumentError("thrust curve needs at least two knots");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(knots_[i].first) || !std::isfinite(knots_[i].second)) {
            throw ArgumentError("thrust curve knot " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && !(knots_[i].first > knots_[i - 1].first)) {
            throw ArgumentError("thrust curve speeds must be strictly increasing");
        }
    }

    // Second derivatives at the knots with M_0 = M_{n-1} = 0, solved by the
    // Thomas algorithm on the interior tridiagonal system.
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = knots_[i + 1].first - knots_[i].first;
    }
    std::vector<double> M(n, 0.0);
    if (n > 2) {
        const std::size_t m = n - 2;
        std::vector<double> diag(m), upper(m), rhs(m);
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = k + 1;
            diag[k] = 2.0 * (h[i - 1] + h[i]);
            upper[k] = h[i];
            rhs[k] = 6.0 * ((knots_[i + 1].second - knots_[i].second) / h[i] -
                            (knots_[i].second - knots_[i - 1].second) / h[i - 1]);
        }
        for (std::size_t k = 1; k < m; ++k) {
            const double lower = h[k];
            const double w = lower / diag[k - 1];
            diag[k] -= w * upper[k - 1];
            rhs[k] -= w * rhs[k - 1];
        }
        M[m] = rhs[m - 1] / diag[m - 1];
        for (std::size_t k = m - 1; k-- > 0;) {
            M[k + 1] = (rhs[k] - upper[k] * M[k + 2]) / diag[k];
        }
    }

    segments_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double y0 = knots_[i].second;
        const double y1 = knots_[i + 1].second;
        segments_[i] = {y0, (y1 - y0) / h[i] - h[i] * (2.0 * M[i] + M[i + 1]) / 6.0, M[i] / 2.0,
                        (M[i + 1] - M[i]) / (6.0 * h[i])};
    }
}

double ThrustCurve::max_thrust(double inflow) const {
    if (!(inflow >= 0.0)) {
        throw DomainError("inflow speed must be non-negative, got " + std::to_string(inflow));
    }
    std::size_t i = 0;
    if (inflow >= knots_.back().first) {
        i = segments_.size() - 1;
    } else if (inflow > knots_.front().first) {
        auto it = std::upper_bound(knots_.begin(), knots_.end(), inflow,
                                   [](double v, const auto& k) { return v < k.first; });
        i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    }
    if (inflow == knots_[i].first) {
        return knots_[i].second;
    }
    if (i + 1 < knots_.size() && inflow == knots_[i + 1].first) {
        return knots_[i + 1].second;
    }
    const auto& s = segments_[i];
    const double dx = inflow - knots_[i].first;
    return s.a + dx * (s.b + dx * (s.c + dx * s.d));
}

ThrustCurve load_thrust_curve(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw LoadError("cannot open thrust curve " + path.string());
    }
    try {
        const auto j = nlohmann::json::parse(in);
        std::vector<std::pair<double, double>> knots;
        for (const auto& k : j.at("knots")) {
            knots.emplace_back(k.at(0).get<double>(), k.at(1).get<double>());
        }
        return ThrustCurve(std::move(knots));
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(path.string() + ": " + e.what());
    } catch (const ArgumentError& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
}

} // namespace vdt::propulsion
