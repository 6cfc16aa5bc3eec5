#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <vector>

namespace vdt::d2p {

/// Bounded FIFO between two threads. A push into a full queue evicts the
/// oldest element and counts it.
template <typename T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

    void push(T value) {
        std::lock_guard lock(mutex_);
        if (items_.size() == capacity_) {
            items_.pop_front();
            ++evicted_;
        }
        items_.push_back(std::move(value));
    }

    std::vector<T> drain() {
        std::lock_guard lock(mutex_);
        std::vector<T> out(std::make_move_iterator(items_.begin()), std::make_move_iterator(items_.end()));
        items_.clear();
        return out;
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return items_.size();
    }

    std::uint64_t evicted() const {
        std::lock_guard lock(mutex_);
        return evicted_;
    }

private:
    mutable std::mutex mutex_;
    std::deque<T> items_;
    std::size_t capacity_;
    std::uint64_t evicted_ = 0;
};

} // namespace vdt::d2p
