#pragma once

#include <vdt/d2p/config.hpp>
#include <vdt/d2p/session.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace vdt::gateway {

struct GatewayOptions {
    d2p::Endpoint bind{"127.0.0.1", 8765};  // port 0 picks a free port
    std::size_t max_backlog = 64;           // queued messages before a client is dropped
    std::optional<int> send_buffer_bytes;   // SO_SNDBUF for client sockets
};

/// Parsed client command. `id` is echoed in the ack.
struct CommandRequest {
    nlohmann::json id;
    d2p::VelocityCommand command;
};

/// Parses {"type":"command","id":..,"velocity":[n,e,d],"yaw_rate":r}.
/// Throws ArgumentError naming the offending field.
CommandRequest parse_command(const nlohmann::json& j);

nlohmann::json ack_json(const nlohmann::json& id, const d2p::CommandAck& ack);
nlohmann::json event_json(const std::string& event, const std::string& text);

/// Live endpoint for one teleop session: WebSocket /session streams
/// telemetry snapshots and session events and accepts commands; HTTP GET
/// /health and /session/metrics. All network work runs on one internal
/// thread; publishing never blocks the caller.
class Gateway {
public:
    explicit Gateway(GatewayOptions opts = {});
    ~Gateway();
    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    /// Binds and starts serving. Throws TransportError on bind failure.
    void start();
    void stop();
    std::uint16_t port() const;

    /// Installs the snapshot and event sinks on `session` and routes commands
    /// and metrics requests to it. Call before the session runs; the session
    /// must outlive stop() or detach().
    void attach(d2p::TeleopSession& session);
    void detach();

    void publish_snapshot(const d2p::TelemetrySnapshot& s);
    void publish_event(const std::string& event, const std::string& text);

    std::size_t client_count() const;
    std::uint64_t dropped_clients() const;
    std::uint64_t snapshots_published() const;

    struct Impl;

private:
    static void publish(const std::shared_ptr<Impl>& d, const d2p::TelemetrySnapshot& s);
    static void publish(const std::shared_ptr<Impl>& d, const std::string& event, const std::string& text);

    std::shared_ptr<Impl> impl_;
};

} // namespace vdt::gateway
