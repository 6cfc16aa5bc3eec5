#pragma once

#include <vdt/d2p/codec.hpp>
#include <vdt/d2p/config.hpp>

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <random>
#include <vector>

namespace vdt::d2p {

/// Unreliable datagram endpoint. `now` is the caller's clock in seconds; real
/// transports ignore it, fault injection and loopback use it.
class DatagramChannel {
public:
    virtual ~DatagramChannel() = default;
    virtual void send(const Bytes& datagram, double now) = 0;
    /// Datagrams available at `now`, in arrival order.
    virtual std::vector<Bytes> receive(double now) = 0;
};

/// In-process link: two endpoints joined by bounded FIFO pipes. Safe to use
/// from one thread per endpoint.
class LoopbackLink {
public:
    explicit LoopbackLink(std::size_t capacity = 1024);

    DatagramChannel& a() { return *a_; }
    DatagramChannel& b() { return *b_; }
    /// Datagrams dropped because a pipe was full.
    std::uint64_t overflow() const;

    struct Pipe {
        explicit Pipe(std::size_t cap) : capacity(cap) {}
        std::mutex mutex;
        std::deque<Bytes> queue;
        std::size_t capacity;
        std::uint64_t overflow = 0;
    };

private:
    std::shared_ptr<Pipe> ab_;
    std::shared_ptr<Pipe> ba_;
    std::unique_ptr<DatagramChannel> a_;
    std::unique_ptr<DatagramChannel> b_;
};

/// Receive-side impairments: each arriving datagram is dropped with
/// `loss_probability`, otherwise held for delay + U(0, jitter), plus
/// `reorder_delay` with `reorder_probability`.
struct LinkFaults {
    double delay = 0.0;   // s
    double jitter = 0.0;  // s
    double loss_probability = 0.0;
    double reorder_probability = 0.0;
    double reorder_delay = 0.05;  // s
    std::uint64_t seed = 0;

    bool any() const;
    /// Throws ArgumentError on negative times or probabilities outside [0, 1].
    void validate() const;
};

/// Wraps a channel and applies LinkFaults to what it receives.
class FaultyChannel final : public DatagramChannel {
public:
    FaultyChannel(DatagramChannel& inner, LinkFaults faults);

    void send(const Bytes& datagram, double now) override;
    std::vector<Bytes> receive(double now) override;

    std::uint64_t dropped() const { return dropped_; }
    std::uint64_t reordered() const { return reordered_; }

private:
    struct Held {
        double release;
        std::uint64_t order;
        Bytes bytes;
    };
    DatagramChannel& inner_;
    LinkFaults faults_;
    std::mt19937_64 rng_;
    std::vector<Held> held_;
    std::uint64_t arrivals_ = 0;
    std::uint64_t dropped_ = 0;
    std::uint64_t reordered_ = 0;
};

/// UDP socket bound to `local` that sends to `remote`. Receive is
/// non-blocking. Throws TransportError when the socket cannot be bound.
class UdpChannel final : public DatagramChannel {
public:
    UdpChannel(const Endpoint& local, const Endpoint& remote);
    ~UdpChannel() override;

    void send(const Bytes& datagram, double now) override;
    std::vector<Bytes> receive(double now) override;

    std::uint16_t local_port() const;
    void set_remote(const Endpoint& remote);
    std::uint64_t send_errors() const { return send_errors_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::uint64_t send_errors_ = 0;
};

} // namespace vdt::d2p
