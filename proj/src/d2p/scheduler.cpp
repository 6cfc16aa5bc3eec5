#include <vdt/common/errors.hpp>
#include <vdt/d2p/scheduler.hpp>

#include <cmath>

namespace vdt::d2p {

namespace {
// Absorbs rounding when the caller's clock lands exactly on a deadline.
constexpr double kSlack = 1e-9;
} // namespace

StreamScheduler::StreamScheduler(double rate, double t0) : rate_(rate), t0_(t0) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw ArgumentError("stream rate must be positive");
    }
}

double StreamScheduler::next_deadline() const { return t0_ + static_cast<double>(index_) / rate_; }

bool StreamScheduler::poll(double now) {
    if (now + kSlack < next_deadline()) {
        return false;
    }
    // Deadlines that are already a full period stale are skipped.
    const double behind = (now + kSlack - t0_) * rate_;
    const auto latest = static_cast<std::uint64_t>(std::floor(behind));
    if (latest > index_) {
        missed_ += latest - index_;
        index_ = latest;
    }
    ++index_;
    ++ticks_;
    return true;
}

} // namespace vdt::d2p
