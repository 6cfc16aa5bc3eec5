#include <vdt/d2p/sequence.hpp>

namespace vdt::d2p {

SequenceTracker::Verdict SequenceTracker::observe(std::uint8_t seq) {
    if (!started_) {
        started_ = true;
        newest_ = seq;
        seen_.reset();
        seen_.set(0);
        ++received_;
        return Verdict::First;
    }
    const auto ahead = static_cast<std::uint8_t>(seq - newest_);
    if (ahead == 0) {
        ++duplicates_;
        return Verdict::Duplicate;
    }
    if (ahead < 128) {
        seen_ <<= ahead;
        seen_.set(0);
        newest_ = seq;
        lost_ += ahead - 1u;
        ++received_;
        return ahead == 1 ? Verdict::InOrder : Verdict::Gap;
    }
    const std::size_t behind = static_cast<std::uint8_t>(newest_ - seq);
    if (behind < seen_.size() && seen_.test(behind)) {
        ++duplicates_;
        return Verdict::Duplicate;
    }
    if (behind < seen_.size()) {
        seen_.set(behind);
    }
    ++out_of_order_;
    ++received_;
    if (lost_ > 0) {
        --lost_;
    }
    return Verdict::Late;
}

} // namespace vdt::d2p
