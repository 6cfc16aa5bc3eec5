#pragma once

#include <vdt/d2p/clamp.hpp>
#include <vdt/d2p/codec.hpp>
#include <vdt/d2p/config.hpp>
#include <vdt/d2p/metrics.hpp>
#include <vdt/d2p/queue.hpp>
#include <vdt/d2p/scheduler.hpp>
#include <vdt/d2p/sequence.hpp>
#include <vdt/d2p/transport.hpp>
#include <vdt/d2p/watchdog.hpp>
#include <vdt/sim/simulator.hpp>

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace vdt::d2p {

/// Operator velocity request for the digital twin.
struct VelocityCommand {
    Vec3 velocity = Vec3::Zero();  // m/s, NED
    double yaw_rate = 0.0;         // rad/s
};

struct CommandAck {
    bool accepted = false;
    std::string reason;            // set when rejected
    Vec3 velocity = Vec3::Zero();  // post-clamp
    double yaw_rate = 0.0;
    bool clamped = false;
};

/// Velocity setpoint with yaw rate, the form operator commands take.
sim::Setpoint command_setpoint(const VelocityCommand& cmd, std::uint32_t t_ms = 0);

/// Time in seconds to the millisecond stamp used on the wire and by the
/// watchdog.
std::int64_t to_ms(double t);

/// Digital twin: the operator-facing simulation. Commands may be submitted
/// from any thread; everything else runs on the owning thread.
class DigitalTwin {
public:
    DigitalTwin(sim::Simulator sim, const BridgeConfig& cfg, std::size_t command_capacity = 64);

    void reset(const vehicle::BodyState& initial);

    /// Clamps through the shared clamp path and queues the command. Rejects
    /// non-finite input, a stopped twin, or a physical twin known to be Lost.
    CommandAck submit(const VelocityCommand& cmd);

    /// Applies queued commands, advances one step and publishes the active
    /// setpoint to the bridge queue.
    void step();

    void stop() { stopped_ = true; }
    bool stopped() const { return stopped_; }
    /// Accepted commands the clamp changed.
    std::uint64_t clamp_events() const { return clamp_events_; }
    /// Offboard status of the physical twin as last reported over the link.
    void set_physical_status(OffboardStatus s) { physical_status_ = s; }
    OffboardStatus physical_status() const { return physical_status_; }

    const sim::Simulator& sim() const { return sim_; }
    double time() const { return sim_.time(); }
    BoundedQueue<sim::Setpoint>& setpoint_queue() { return published_; }

    /// Snapshot of what the gateway shows: state, active setpoint and the
    /// clamp flag of the most recent command.
    struct View {
        double t = 0.0;
        vehicle::BodyState state;
        sim::Setpoint active;
        bool last_command_clamped = false;
        std::uint64_t commands_applied = 0;
    };
    View view() const;

    TwinTrace trace() const;
    std::vector<sim::TelemetryRecord> log() const;
    void set_record_every(std::size_t n) { record_every_ = n == 0 ? 1 : n; }

private:
    sim::Simulator sim_;
    BridgeConfig cfg_;
    BoundedQueue<std::pair<sim::Setpoint, bool>> commands_;
    BoundedQueue<sim::Setpoint> published_;
    std::atomic<bool> stopped_{false};
    std::atomic<std::uint64_t> clamp_events_{0};
    std::atomic<OffboardStatus> physical_status_{OffboardStatus::Inactive};

    mutable std::mutex mutex_;
    View view_;
    TwinTrace trace_;
    std::vector<sim::TelemetryRecord> log_;
    std::size_t record_every_ = 5;
    std::uint64_t steps_ = 0;
};

/// What the digital side knows about the physical twin from the return path.
struct PhysicalView {
    std::optional<LocalPosition> position;
    std::optional<Attitude> attitude;
    OffboardStatus offboard = OffboardStatus::Inactive;
    double last_rx = -1.0;  // s
};

struct SendRecord {
    double t = 0.0;
    std::uint8_t sequence = 0;
    sim::Setpoint setpoint;
    bool clamped = false;  // the bridge itself had to clamp
};

/// D2P bridge: streams the digital twin's latest setpoint at the stream rate
/// (sticky between updates), clamps every outgoing setpoint, sends
/// heartbeats, and decodes the physical twin's state reports.
class Bridge {
public:
    Bridge(const BridgeConfig& cfg, DatagramChannel& link, double t0 = 0.0);

    /// Pulls new setpoints from `source`, sends if a tick is due and drains
    /// the return path. Returns true if a setpoint frame was sent.
    bool poll(double now, BoundedQueue<sim::Setpoint>& source);

    /// Stream kill: stop sending setpoints and heartbeats.
    void kill(double now);
    void resume() { killed_ = false; }
    bool killed() const { return killed_; }
    std::optional<double> killed_at() const { return killed_at_; }

    PhysicalView physical() const;
    std::vector<SendRecord> sends() const;
    std::uint64_t send_count() const;
    std::uint64_t unclamped_sends() const;
    std::uint64_t clamp_events() const;
    std::uint64_t missed_ticks() const { return scheduler_.missed(); }
    std::uint64_t decode_errors() const;
    const SequenceTracker& return_sequence() const { return rx_seq_; }

private:
    void send_frame(const Message& m, double now);
    void handle(const Frame& f, double now);

    BridgeConfig cfg_;
    DatagramChannel& link_;
    StreamScheduler scheduler_;
    StreamScheduler heartbeat_;
    std::optional<sim::Setpoint> latest_;
    std::uint8_t sequence_ = 0;
    bool killed_ = false;
    std::optional<double> killed_at_;
    SequenceTracker rx_seq_;

    mutable std::mutex mutex_;
    PhysicalView physical_;
    std::vector<SendRecord> sends_;
    std::uint64_t unclamped_ = 0;
    std::uint64_t clamp_events_ = 0;
    std::uint64_t decode_errors_ = 0;
};

struct ReceiveRecord {
    double t = 0.0;
    std::uint8_t sequence = 0;
    sim::Setpoint setpoint;
};

struct StatusChange {
    double t = 0.0;
    OffboardStatus from = OffboardStatus::Inactive;
    OffboardStatus to = OffboardStatus::Inactive;
};

/// Physical twin: applies received setpoints, runs the offboard watchdog
/// (Lost -> position hold) and reports its state back at the stream rate.
class PhysicalTwin {
public:
    PhysicalTwin(sim::Simulator sim, const BridgeConfig& cfg, DatagramChannel& link);

    void reset(const vehicle::BodyState& initial);

    /// Receive, watchdog, one simulation step, state report if due.
    void step();

    const sim::Simulator& sim() const { return sim_; }
    double time() const { return sim_.time(); }
    OffboardState offboard() const;
    std::vector<ReceiveRecord> receives() const;
    std::vector<StatusChange> status_changes() const;
    TwinTrace trace() const;
    std::vector<sim::TelemetryRecord> log() const;
    void set_record_every(std::size_t n) { record_every_ = n == 0 ? 1 : n; }

    std::uint64_t decode_errors() const;
    std::map<std::string, std::uint64_t> decode_error_counts() const;
    /// Received setpoints that violated the velocity limit (must stay 0).
    std::uint64_t unclamped_received() const;
    const SequenceTracker& sequence() const { return rx_seq_; }
    /// RMS of (actual velocity - commanded velocity) over steps with an
    /// Active velocity setpoint.
    Vec3 tracking_rms() const;

private:
    void handle(const Frame& f, double now);
    void set_status(OffboardStatus s, double now);
    void send_frame(const Message& m, double now);

    sim::Simulator sim_;
    BridgeConfig cfg_;
    DatagramChannel& link_;
    StreamScheduler report_;
    SequenceTracker rx_seq_;
    std::uint8_t sequence_ = 0;

    mutable std::mutex mutex_;
    OffboardState offboard_;
    std::vector<ReceiveRecord> receives_;
    std::vector<StatusChange> changes_;
    TwinTrace trace_;
    std::vector<sim::TelemetryRecord> log_;
    std::size_t record_every_ = 5;
    std::uint64_t steps_ = 0;
    std::map<std::string, std::uint64_t> decode_errors_;
    std::uint64_t unclamped_ = 0;
    Vec3 tracking_sq_ = Vec3::Zero();
    std::uint64_t tracking_n_ = 0;
};

} // namespace vdt::d2p
