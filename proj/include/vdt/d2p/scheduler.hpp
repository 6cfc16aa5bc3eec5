#pragma once

#include <cstdint>

namespace vdt::d2p {

/// Fixed-rate tick source on an absolute grid t0 + k / rate, so the long-run
/// period is exact regardless of when it is polled. Ticks that fall more than
/// one period behind are skipped and counted as missed.
class StreamScheduler {
public:
    /// Throws ArgumentError unless rate > 0.
    explicit StreamScheduler(double rate, double t0 = 0.0);

    /// True if a send is due at `now`; advances to the next deadline.
    bool poll(double now);

    double rate() const { return rate_; }
    double next_deadline() const;
    std::uint64_t ticks() const { return ticks_; }
    std::uint64_t missed() const { return missed_; }

private:
    double rate_;
    double t0_;
    std::uint64_t index_ = 0;  // index of the next deadline
    std::uint64_t ticks_ = 0;
    std::uint64_t missed_ = 0;
};

} // namespace vdt::d2p
