#include <vdt/common/errors.hpp>
#include <vdt/d2p/transport.hpp>

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/address.hpp>
#include <boost/asio/ip/udp.hpp>

#include <algorithm>
#include <array>

namespace vdt::d2p {

namespace {

class PipeEnd final : public DatagramChannel {
public:
    PipeEnd(std::shared_ptr<LoopbackLink::Pipe> out, std::shared_ptr<LoopbackLink::Pipe> in)
        : out_(std::move(out)), in_(std::move(in)) {}

    void send(const Bytes& datagram, double) override {
        std::lock_guard lock(out_->mutex);
        if (out_->queue.size() >= out_->capacity) {
            ++out_->overflow;
            return;
        }
        out_->queue.push_back(datagram);
    }

    std::vector<Bytes> receive(double) override {
        std::lock_guard lock(in_->mutex);
        std::vector<Bytes> out(std::make_move_iterator(in_->queue.begin()), std::make_move_iterator(in_->queue.end()));
        in_->queue.clear();
        return out;
    }

private:
    std::shared_ptr<LoopbackLink::Pipe> out_;
    std::shared_ptr<LoopbackLink::Pipe> in_;
};

} // namespace

LoopbackLink::LoopbackLink(std::size_t capacity)
    : ab_(std::make_shared<Pipe>(capacity)), ba_(std::make_shared<Pipe>(capacity)),
      a_(std::make_unique<PipeEnd>(ab_, ba_)), b_(std::make_unique<PipeEnd>(ba_, ab_)) {}

std::uint64_t LoopbackLink::overflow() const {
    std::lock_guard la(ab_->mutex);
    std::lock_guard lb(ba_->mutex);
    return ab_->overflow + ba_->overflow;
}

bool LinkFaults::any() const {
    return delay > 0.0 || jitter > 0.0 || loss_probability > 0.0 || reorder_probability > 0.0;
}

void LinkFaults::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!(delay >= 0.0) || !(jitter >= 0.0) || !(reorder_delay >= 0.0)) {
        throw ArgumentError("link delays must be non-negative");
    }
    if (!prob(loss_probability) || !prob(reorder_probability)) {
        throw ArgumentError("link probabilities must lie in [0, 1]");
    }
}

FaultyChannel::FaultyChannel(DatagramChannel& inner, LinkFaults faults)
    : inner_(inner), faults_(faults), rng_(faults.seed) {
    faults_.validate();
}

void FaultyChannel::send(const Bytes& datagram, double now) { inner_.send(datagram, now); }

std::vector<Bytes> FaultyChannel::receive(double now) {
    auto unit = [this] { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; };
    for (auto& d : inner_.receive(now)) {
        if (faults_.loss_probability > 0.0 && unit() < faults_.loss_probability) {
            ++dropped_;
            continue;
        }
        double release = now + faults_.delay;
        if (faults_.jitter > 0.0) {
            release += faults_.jitter * unit();
        }
        if (faults_.reorder_probability > 0.0 && unit() < faults_.reorder_probability) {
            release += faults_.reorder_delay;
            ++reordered_;
        }
        held_.push_back({release, arrivals_++, std::move(d)});
    }
    std::vector<Held> due;
    std::vector<Held> keep;
    for (auto& h : held_) {
        (h.release <= now + 1e-9 ? due : keep).push_back(std::move(h));
    }
    held_ = std::move(keep);
    std::sort(due.begin(), due.end(),
              [](const Held& a, const Held& b) { return a.release != b.release ? a.release < b.release : a.order < b.order; });
    std::vector<Bytes> out;
    out.reserve(due.size());
    for (auto& h : due) {
        out.push_back(std::move(h.bytes));
    }
    return out;
}

struct UdpChannel::Impl {
    boost::asio::io_context io;
    boost::asio::ip::udp::socket socket{io};
    boost::asio::ip::udp::endpoint remote;
};

namespace {

boost::asio::ip::udp::endpoint resolve(const Endpoint& e) {
    boost::system::error_code ec;
    const auto addr = boost::asio::ip::make_address(e.host == "localhost" ? "127.0.0.1" : e.host, ec);
    if (ec) {
        throw TransportError("cannot parse address '" + e.host + "': " + ec.message());
    }
    return {addr, e.port};
}

} // namespace

UdpChannel::UdpChannel(const Endpoint& local, const Endpoint& remote) : impl_(std::make_unique<Impl>()) {
    const auto local_ep = resolve(local);
    impl_->remote = resolve(remote);
    boost::system::error_code ec;
    impl_->socket.open(local_ep.protocol(), ec);
    if (!ec) {
        impl_->socket.bind(local_ep, ec);
    }
    if (ec) {
        throw TransportError("cannot bind UDP " + local.str() + ": " + ec.message());
    }
    impl_->socket.non_blocking(true, ec);
}

UdpChannel::~UdpChannel() = default;

void UdpChannel::send(const Bytes& datagram, double) {
    boost::system::error_code ec;
    impl_->socket.send_to(boost::asio::buffer(datagram), impl_->remote, 0, ec);
    if (ec) {
        ++send_errors_;
    }
}

std::vector<Bytes> UdpChannel::receive(double) {
    std::vector<Bytes> out;
    std::array<std::uint8_t, 512> buf{};
    for (;;) {
        boost::asio::ip::udp::endpoint from;
        boost::system::error_code ec;
        const std::size_t n = impl_->socket.receive_from(boost::asio::buffer(buf), from, 0, ec);
        if (ec) {
            // would_block ends the drain; ICMP-induced refusals are skipped.
            if (ec == boost::asio::error::connection_refused) {
                continue;
            }
            break;
        }
        out.emplace_back(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n));
    }
    return out;
}

std::uint16_t UdpChannel::local_port() const { return impl_->socket.local_endpoint().port(); }

void UdpChannel::set_remote(const Endpoint& remote) { impl_->remote = resolve(remote); }

} // namespace vdt::d2p
