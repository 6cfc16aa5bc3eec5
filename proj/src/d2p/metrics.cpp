#include <vdt/common/errors.hpp>
#include <vdt/d2p/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vdt::d2p {

namespace {

void check_sorted(const TwinTrace& trace, const char* name) {
    if (trace.empty()) {
        throw ArgumentError(std::string(name) + " trace is empty");
    }
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (!(trace[i].t >= trace[i - 1].t)) {
            throw ArgumentError(std::string(name) + " trace is not sorted in time");
        }
    }
}

/// Normalized cross-correlation of d[k] against p[k + lag] over 3 axes.
double correlation(const std::vector<Vec3>& d, const std::vector<Vec3>& p, std::size_t lag) {
    const std::size_t n = d.size() - lag;
    Vec3 md = Vec3::Zero();
    Vec3 mp = Vec3::Zero();
    for (std::size_t k = 0; k < n; ++k) {
        md += d[k];
        mp += p[k + lag];
    }
    md /= static_cast<double>(n);
    mp /= static_cast<double>(n);
    double num = 0.0;
    double sd = 0.0;
    double sp = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec3 a = d[k] - md;
        const Vec3 b = p[k + lag] - mp;
        num += a.dot(b);
        sd += a.squaredNorm();
        sp += b.squaredNorm();
    }
    const double den = std::sqrt(sd * sp);
    return den > 1e-300 ? num / den : 0.0;
}

} // namespace

TwinSample sample_at(const TwinTrace& trace, double t) {
    if (trace.empty()) {
        throw ArgumentError("cannot sample an empty trace");
    }
    if (t <= trace.front().t) {
        return trace.front();
    }
    if (t >= trace.back().t) {
        return trace.back();
    }
    const auto hi = std::upper_bound(trace.begin(), trace.end(), t,
                                     [](double v, const TwinSample& s) { return v < s.t; });
    const auto lo = hi - 1;
    const double span = hi->t - lo->t;
    const double w = span > 0.0 ? (t - lo->t) / span : 0.0;
    TwinSample s;
    s.t = t;
    s.position = (1.0 - w) * lo->position + w * hi->position;
    s.velocity = (1.0 - w) * lo->velocity + w * hi->velocity;
    return s;
}

TwinSyncMetrics compute_sync_metrics(const TwinTrace& digital, const TwinTrace& physical, const SyncOptions& opt) {
    if (!(opt.resample_rate > 0.0) || !(opt.max_lag >= 0.0)) {
        throw ArgumentError("sync metrics need a positive resample rate and non-negative max lag");
    }
    check_sorted(digital, "digital");
    check_sorted(physical, "physical");
    const double t0 = std::max(digital.front().t, physical.front().t);
    const double t1 = std::min(digital.back().t, physical.back().t);
    if (!(t1 - t0 >= opt.min_overlap)) {
        std::ostringstream msg;
        msg << "insufficient overlap between twin logs: " << std::max(0.0, t1 - t0) << " s, need "
            << opt.min_overlap << " s";
        throw ArgumentError(msg.str());
    }

    const auto n = static_cast<std::size_t>(std::floor((t1 - t0) * opt.resample_rate + 1e-9)) + 1;
    std::vector<Vec3> dv(n);
    std::vector<Vec3> pv(n);
    TwinSyncMetrics m;
    m.samples = n;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t0 + static_cast<double>(k) / opt.resample_rate;
        const TwinSample a = sample_at(digital, t);
        const TwinSample b = sample_at(physical, t);
        dv[k] = a.velocity;
        pv[k] = b.velocity;
        m.max_position_divergence = std::max(m.max_position_divergence, (a.position - b.position).norm());
    }

    const auto max_lag = std::min(static_cast<std::size_t>(std::lround(opt.max_lag * opt.resample_rate)), n / 2);
    std::vector<double> c(max_lag + 1);
    std::size_t best = 0;
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        c[lag] = correlation(dv, pv, lag);
        if (c[lag] > c[best]) {
            best = lag;
        }
    }
    double refined = static_cast<double>(best);
    if (best > 0 && best < max_lag) {
        const double den = c[best - 1] - 2.0 * c[best] + c[best + 1];
        if (den < 0.0) {
            refined += std::clamp(0.5 * (c[best - 1] - c[best + 1]) / den, -0.5, 0.5);
        }
    }
    m.lag_estimate = std::max(0.0, refined / opt.resample_rate);
    m.peak_correlation = c[best];

    Vec3 sq = Vec3::Zero();
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t0 + static_cast<double>(k) / opt.resample_rate;
        if (t + m.lag_estimate > physical.back().t + 1e-9) {
            break;
        }
        const Vec3 e = sample_at(physical, t + m.lag_estimate).velocity - dv[k];
        sq += e.cwiseProduct(e);
        ++count;
    }
    if (count > 0) {
        m.rms_velocity_error = (sq / static_cast<double>(count)).cwiseSqrt();
    }
    return m;
}

nlohmann::json to_json(const TwinSyncMetrics& m) {
    return {{"lag_estimate", m.lag_estimate},
            {"peak_correlation", m.peak_correlation},
            {"rms_velocity_error", {m.rms_velocity_error.x(), m.rms_velocity_error.y(), m.rms_velocity_error.z()}},
            {"max_position_divergence", m.max_position_divergence},
            {"samples", m.samples}};
}

} // namespace vdt::d2p
