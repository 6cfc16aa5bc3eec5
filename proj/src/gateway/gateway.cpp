#include <vdt/common/errors.hpp>
#include <vdt/gateway/gateway.hpp>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

namespace vdt::gateway {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

CommandRequest parse_command(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ArgumentError("command must be a JSON object");
    }
    CommandRequest req;
    req.id = j.value("id", nlohmann::json());
    const auto v = j.find("velocity");
    if (v == j.end() || !v->is_array() || v->size() != 3) {
        throw ArgumentError("command field 'velocity' must be a 3-element array");
    }
    for (int i = 0; i < 3; ++i) {
        if (!(*v)[i].is_number()) {
            throw ArgumentError("command field 'velocity' must hold numbers");
        }
        req.command.velocity[i] = (*v)[i].get<double>();
    }
    if (const auto r = j.find("yaw_rate"); r != j.end()) {
        if (!r->is_number()) {
            throw ArgumentError("command field 'yaw_rate' must be a number");
        }
        req.command.yaw_rate = r->get<double>();
    }
    return req;
}

nlohmann::json ack_json(const nlohmann::json& id, const d2p::CommandAck& ack) {
    nlohmann::json j{{"type", "ack"}, {"id", id}, {"accepted", ack.accepted}};
    if (ack.accepted) {
        j["velocity"] = {ack.velocity.x(), ack.velocity.y(), ack.velocity.z()};
        j["yaw_rate"] = ack.yaw_rate;
        j["clamped"] = ack.clamped;
    } else {
        j["reason"] = ack.reason;
    }
    return j;
}

nlohmann::json event_json(const std::string& event, const std::string& text) {
    return {{"type", "session"}, {"event", event}, {"text", text}};
}

namespace {

using Message = std::shared_ptr<const std::string>;

} // namespace

class WsClient;

struct Gateway::Impl {
    explicit Impl(GatewayOptions o) : opts(std::move(o)) {}

    // Declared first so sockets below are destroyed before it.
    net::io_context io;
    GatewayOptions opts;
    std::optional<tcp::acceptor> acceptor;
    std::thread thread;
    bool started = false;
    std::atomic<bool> stopped{false};
    std::uint16_t port = 0;
    std::chrono::steady_clock::time_point started_at;

    std::set<std::shared_ptr<WsClient>> clients;  // io thread only
    std::atomic<std::size_t> client_count{0};
    std::atomic<std::uint64_t> dropped{0};
    std::atomic<std::uint64_t> published{0};

    mutable std::mutex session_mutex;
    d2p::TeleopSession* session = nullptr;
    std::string session_state = "idle";

    void accept();
    void add(const std::shared_ptr<WsClient>& c);
    void remove(const std::shared_ptr<WsClient>& c);
    void broadcast(Message m);
    nlohmann::json handle_ws_text(const std::string& text);
    http::response<http::string_body> handle_http(const http::request<http::string_body>& req);
};

class WsClient : public std::enable_shared_from_this<WsClient> {
public:
    WsClient(tcp::socket socket, Gateway::Impl& hub) : ws_(std::move(socket)), hub_(hub) {}

    void run(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
            if (ec) {
                return;
            }
            self->hub_.add(self);
            self->read();
        });
    }

    void enqueue(Message m) {
        if (closed_) {
            return;
        }
        if (queue_.size() >= hub_.opts.max_backlog) {
            spdlog::warn("gateway: dropping slow client after {} queued messages", queue_.size());
            ++hub_.dropped;
            close();
            return;
        }
        queue_.push_back(std::move(m));
        if (queue_.size() == 1) {
            write();
        }
    }

    void close() {
        if (closed_) {
            return;
        }
        closed_ = true;
        beast::error_code ec;
        beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
        beast::get_lowest_layer(ws_).socket().close(ec);
        hub_.remove(shared_from_this());
    }

private:
    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->close();
                return;
            }
            const std::string text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            self->enqueue(std::make_shared<const std::string>(self->hub_.handle_ws_text(text).dump()));
            self->read();
        });
    }

    void write() {
        ws_.text(true);
        ws_.async_write(net::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->close();
                return;
            }
            self->queue_.pop_front();
            if (!self->queue_.empty() && !self->closed_) {
                self->write();
            }
        });
    }

    websocket::stream<beast::tcp_stream> ws_;
    Gateway::Impl& hub_;
    beast::flat_buffer buffer_;
    std::deque<Message> queue_;
    bool closed_ = false;
};

namespace {

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
public:
    HttpConnection(tcp::socket socket, Gateway::Impl& hub) : stream_(std::move(socket)), hub_(hub) {}

    void read() {
        req_ = {};
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                return;
            }
            self->dispatch();
        });
    }

private:
    void dispatch() {
        if (websocket::is_upgrade(req_) && req_.target() == "/session") {
            stream_.expires_never();
            std::make_shared<WsClient>(stream_.release_socket(), hub_)->run(std::move(req_));
            return;
        }
        auto res = std::make_shared<http::response<http::string_body>>(hub_.handle_http(req_));
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
            if (ec || !res->keep_alive()) {
                beast::error_code ignored;
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                return;
            }
            self->read();
        });
    }

    beast::tcp_stream stream_;
    Gateway::Impl& hub_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
};

} // namespace

void Gateway::Impl::accept() {
    acceptor->async_accept([this](beast::error_code ec, tcp::socket socket) {
        if (ec) {
            if (ec != net::error::operation_aborted) {
                spdlog::warn("gateway accept failed: {}", ec.message());
                accept();
            }
            return;
        }
        if (opts.send_buffer_bytes) {
            beast::error_code ignored;
            socket.set_option(net::socket_base::send_buffer_size(*opts.send_buffer_bytes), ignored);
        }
        std::make_shared<HttpConnection>(std::move(socket), *this)->read();
        accept();
    });
}

void Gateway::Impl::add(const std::shared_ptr<WsClient>& c) {
    clients.insert(c);
    client_count = clients.size();
}

void Gateway::Impl::remove(const std::shared_ptr<WsClient>& c) {
    clients.erase(c);
    client_count = clients.size();
}

void Gateway::Impl::broadcast(Message m) {
    const std::vector<std::shared_ptr<WsClient>> targets(clients.begin(), clients.end());
    for (const auto& c : targets) {
        c->enqueue(m);
    }
}

nlohmann::json Gateway::Impl::handle_ws_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception&) {
        return {{"type", "error"}, {"reason", "invalid JSON"}};
    }
    const std::string type = j.is_object() ? j.value("type", std::string()) : std::string();
    if (type != "command") {
        return {{"type", "error"}, {"reason", "unknown message type '" + type + "'"}};
    }
    const nlohmann::json id = j.value("id", nlohmann::json());
    d2p::CommandAck ack;
    try {
        const CommandRequest req = parse_command(j);
        std::lock_guard lock(session_mutex);
        if (session == nullptr) {
            ack.reason = "no session";
        } else {
            ack = session->submit(req.command);
        }
    } catch (const ArgumentError& e) {
        ack.reason = e.what();
    }
    return ack_json(id, ack);
}

http::response<http::string_body> Gateway::Impl::handle_http(const http::request<http::string_body>& req) {
    auto reply = [&](http::status status, const nlohmann::json& body) {
        http::response<http::string_body> res{status, req.version()};
        res.set(http::field::content_type, "application/json");
        res.set(http::field::access_control_allow_origin, "*");
        res.keep_alive(req.keep_alive());
        res.body() = body.dump();
        res.prepare_payload();
        return res;
    };
    if (req.method() != http::verb::get) {
        return reply(http::status::method_not_allowed, {{"error", "only GET is supported"}});
    }
    if (req.target() == "/health") {
        const double uptime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_at).count();
        std::string state;
        {
            std::lock_guard lock(session_mutex);
            state = session_state;
        }
        return reply(http::status::ok, {{"status", "ok"},
                                        {"session", state},
                                        {"clients", client_count.load()},
                                        {"uptime", uptime},
                                        {"snapshots", published.load()},
                                        {"dropped_clients", dropped.load()}});
    }
    if (req.target() == "/session/metrics") {
        std::lock_guard lock(session_mutex);
        if (session == nullptr) {
            return reply(http::status::service_unavailable, {{"error", "no session"}});
        }
        try {
            return reply(http::status::ok, d2p::to_json(session->metrics_to_date()));
        } catch (const Error& e) {
            return reply(http::status::service_unavailable, {{"error", e.what()}});
        }
    }
    return reply(http::status::not_found, {{"error", "unknown path " + std::string(req.target())}});
}

Gateway::Gateway(GatewayOptions opts) : impl_(std::make_shared<Impl>(std::move(opts))) {
    if (impl_->opts.max_backlog == 0) {
        throw ArgumentError("gateway backlog must be positive");
    }
}

Gateway::~Gateway() { stop(); }

void Gateway::start() {
    Impl& d = *impl_;
    if (d.started) {
        throw ArgumentError("gateway already started");
    }
    beast::error_code ec;
    const auto addr = net::ip::make_address(d.opts.bind.host == "localhost" ? "127.0.0.1" : d.opts.bind.host, ec);
    if (ec) {
        throw TransportError("cannot parse gateway address '" + d.opts.bind.host + "': " + ec.message());
    }
    const tcp::endpoint ep(addr, d.opts.bind.port);
    d.acceptor.emplace(d.io);
    d.acceptor->open(ep.protocol(), ec);
    if (!ec) {
        d.acceptor->set_option(net::socket_base::reuse_address(true), ec);
    }
    if (!ec) {
        d.acceptor->bind(ep, ec);
    }
    if (!ec) {
        d.acceptor->listen(net::socket_base::max_listen_connections, ec);
    }
    if (ec) {
        throw TransportError("cannot bind gateway " + d.opts.bind.str() + ": " + ec.message());
    }
    d.port = d.acceptor->local_endpoint().port();
    d.started_at = std::chrono::steady_clock::now();
    d.started = true;
    d.accept();
    d.thread = std::thread([&d] {
        for (;;) {
            try {
                d.io.run();
                return;
            } catch (const std::exception& e) {
                spdlog::error("gateway handler failed: {}", e.what());
            }
        }
    });
    spdlog::info("gateway listening on {}:{}", d.opts.bind.host, d.port);
}

void Gateway::stop() {
    Impl& d = *impl_;
    if (!d.started || d.stopped) {
        return;
    }
    d.stopped = true;
    net::post(d.io, [&d] {
        beast::error_code ec;
        d.acceptor->close(ec);
        const std::vector<std::shared_ptr<WsClient>> all(d.clients.begin(), d.clients.end());
        for (const auto& c : all) {
            c->close();
        }
        d.io.stop();
    });
    d.thread.join();
    detach();
}

std::uint16_t Gateway::port() const { return impl_->port; }

void Gateway::attach(d2p::TeleopSession& session) {
    {
        std::lock_guard lock(impl_->session_mutex);
        impl_->session = &session;
        impl_->session_state = session.running() ? "running" : "ready";
    }
    // The session may outlive the gateway; sinks go quiet once it is gone.
    std::weak_ptr<Impl> weak = impl_;
    session.on_snapshot([weak](const d2p::TelemetrySnapshot& s) {
        if (auto d = weak.lock()) {
            Gateway::publish(d, s);
        }
    });
    session.on_event([weak](const std::string& event, const std::string& text) {
        if (auto d = weak.lock()) {
            Gateway::publish(d, event, text);
        }
    });
}

void Gateway::detach() {
    std::lock_guard lock(impl_->session_mutex);
    impl_->session = nullptr;
}

void Gateway::publish_snapshot(const d2p::TelemetrySnapshot& s) { publish(impl_, s); }

void Gateway::publish_event(const std::string& event, const std::string& text) { publish(impl_, event, text); }

void Gateway::publish(const std::shared_ptr<Impl>& d, const d2p::TelemetrySnapshot& s) {
    Message m;
    try {
        m = std::make_shared<const std::string>(d2p::to_json(s).dump());
    } catch (const nlohmann::json::exception& e) {
        publish(d, "error", std::string("snapshot serialization failed: ") + e.what());
        return;
    }
    ++d->published;
    if (d->stopped) {
        return;
    }
    net::post(d->io, [d, m] { d->broadcast(m); });
}

void Gateway::publish(const std::shared_ptr<Impl>& d, const std::string& event, const std::string& text) {
    {
        std::lock_guard lock(d->session_mutex);
        if (event == "start") {
            d->session_state = "running";
        } else if (event == "stop" && d->session_state != "error") {
            d->session_state = "stopped";
        } else if (event == "error") {
            d->session_state = "error";
        }
    }
    if (d->stopped) {
        return;
    }
    auto m = std::make_shared<const std::string>(event_json(event, text).dump(-1, ' ', false,
                                                                              nlohmann::json::error_handler_t::replace));
    net::post(d->io, [d, m] { d->broadcast(m); });
}

std::size_t Gateway::client_count() const { return impl_->client_count; }

std::uint64_t Gateway::dropped_clients() const { return impl_->dropped; }

std::uint64_t Gateway::snapshots_published() const { return impl_->published; }

} // namespace vdt::gateway
