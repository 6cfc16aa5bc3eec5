#pragma once

#include <vdt/common/math.hpp>

#include <nlohmann/json.hpp>

#include <cstddef>
#include <vector>

namespace vdt::d2p {

/// One time-stamped sample of a twin on the common session clock.
struct TwinSample {
    double t = 0.0;                    // s
    Vec3 position = Vec3::Zero();      // m, NED
    Vec3 velocity = Vec3::Zero();      // m/s, NED
};

using TwinTrace = std::vector<TwinSample>;

struct TwinSyncMetrics {
    double lag_estimate = 0.0;            // s, physical behind digital
    double peak_correlation = 0.0;        // normalized cross-correlation at the lag
    Vec3 rms_velocity_error = Vec3::Zero();  // m/s per axis, after lag alignment
    double max_position_divergence = 0.0;    // m, same-time comparison
    std::size_t samples = 0;
};

struct SyncOptions {
    double resample_rate = 30.0;  // Hz
    double max_lag = 2.0;         // s
    double min_overlap = 5.0;     // s
};

/// Linear interpolation of a trace at time t (clamped to its ends).
TwinSample sample_at(const TwinTrace& trace, double t);

/// Resamples both traces on a common grid over their overlap, estimates the
/// lag as the argmax of the normalized cross-correlation of the velocity
/// traces over [0, max_lag] (parabolic sub-sample refinement) and computes the
/// per-axis RMS velocity error after shifting the physical trace by the lag.
/// Throws ArgumentError if the overlap is shorter than min_overlap or a trace
/// is not sorted in time.
TwinSyncMetrics compute_sync_metrics(const TwinTrace& digital, const TwinTrace& physical, const SyncOptions& opt = {});

nlohmann::json to_json(const TwinSyncMetrics& m);

} // namespace vdt::d2p
