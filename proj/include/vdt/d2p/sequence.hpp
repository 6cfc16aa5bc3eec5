#pragma once

#include <bitset>
#include <cstdint>

namespace vdt::d2p {

/// Receiver-side accounting of 8-bit wrapping sequence numbers. A frame more
/// than half the window behind the newest one is treated as late.
class SequenceTracker {
public:
    enum class Verdict { First, InOrder, Gap, Late, Duplicate };

    Verdict observe(std::uint8_t seq);

    std::uint64_t received() const { return received_; }
    std::uint64_t duplicates() const { return duplicates_; }
    std::uint64_t out_of_order() const { return out_of_order_; }
    /// Frames skipped over and not (yet) seen late.
    std::uint64_t lost() const { return lost_; }
    std::uint8_t newest() const { return newest_; }

private:
    bool started_ = false;
    std::uint8_t newest_ = 0;
    std::bitset<128> seen_;  // bit k: newest - k has been received
    std::uint64_t received_ = 0;
    std::uint64_t duplicates_ = 0;
    std::uint64_t out_of_order_ = 0;
    std::uint64_t lost_ = 0;
};

} // namespace vdt::d2p
