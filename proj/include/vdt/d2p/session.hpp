#pragma once

#include <vdt/d2p/twins.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace vdt::d2p {

/// Operator input scheduled on the session clock.
struct ScriptedCommand {
    double t = 0.0;  // s
    VelocityCommand command;
};

struct OperatorScript {
    std::vector<ScriptedCommand> commands;  // sorted by t

    /// Hover for `lead`, then four legs N, E, S, W at `speed` for
    /// `leg_duration` each, then zero velocity.
    static OperatorScript square(double speed, double leg_duration, double lead = 2.0);
};

nlohmann::json to_json(const OperatorScript& s);
OperatorScript operator_script_from_json(const nlohmann::json& j);

/// Gateway-facing snapshot of the session.
struct TelemetrySnapshot {
    double timestamp = 0.0;  // s, session clock
    std::uint64_t sequence = 0;
    DigitalTwin::View digital;
    PhysicalView physical;
    bool clamp_flag = false;
};

nlohmann::json to_json(const TelemetrySnapshot& s);

/// How the physical twin differs from the digital model it mirrors.
struct PlantMismatch {
    double mass_scale = 1.0;
    double inertia_scale = 1.0;
    Vec3 wind = Vec3::Zero();  // m/s, NED, acting on the physical twin only

    /// A few percent of mass/inertia error and a light breeze.
    static PlantMismatch nominal();
};

nlohmann::json to_json(const PlantMismatch& m);
PlantMismatch plant_mismatch_from_json(const nlohmann::json& j);

struct SessionConfig {
    BridgeConfig bridge;
    sim::SimConfig sim;
    vehicle::BodyState initial;  // both twins start here
    double duration = 60.0;      // s
    LinkFaults downlink;         // digital -> physical
    LinkFaults uplink;           // physical -> digital
    PlantMismatch physical_plant = PlantMismatch::nominal();
    std::optional<double> kill_stream_at;  // s
    OperatorScript script;
    double snapshot_rate = 10.0;  // Hz
    std::size_t record_every = 5;  // telemetry log decimation (sim steps)
    /// Wall-clock pacing: 0 runs as fast as possible, 1 is real time.
    double realtime_factor = 0.0;

    SessionConfig();
    /// Throws ArgumentError.
    void validate() const;
};

struct SessionResult {
    double duration = 0.0;
    std::uint64_t sends = 0;
    std::uint64_t unclamped_sends = 0;
    std::uint64_t clamp_events = 0;  // commands the clamp changed
    std::uint64_t missed_ticks = 0;
    std::uint64_t frames_received = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t out_of_order = 0;
    std::uint64_t lost_frames = 0;
    std::uint64_t decode_errors = 0;
    std::uint64_t unclamped_received = 0;
    std::optional<double> kill_time;
    std::optional<double> watchdog_trip_time;  // first Active -> Lost after the kill
    Vec3 physical_tracking_rms = Vec3::Zero();
    std::optional<TwinSyncMetrics> metrics;
    std::string metrics_error;
    std::string error;  // set if a twin halted the run

    TwinTrace digital_trace;
    TwinTrace physical_trace;
    std::vector<sim::TelemetryRecord> digital_log;
    std::vector<sim::TelemetryRecord> physical_log;
    std::vector<SendRecord> send_log;
    std::vector<ReceiveRecord> receive_log;
    std::vector<StatusChange> offboard_changes;

    nlohmann::json summary_json() const;
};

/// Digital twin, bridge and physical twin joined by a pair of datagram
/// channels. The single-threaded driver steps all three on one simulated
/// clock; the threaded driver gives each component its own thread on the
/// wall clock.
class TeleopSession {
public:
    /// Loopback session owning its in-process link.
    TeleopSession(SessionConfig cfg, std::shared_ptr<const aero::AeroDatabase> db);
    /// Session over caller-provided endpoints (for example UDP).
    TeleopSession(SessionConfig cfg, std::shared_ptr<const aero::AeroDatabase> db, DatagramChannel& digital_end,
                  DatagramChannel& physical_end);
    ~TeleopSession();

    /// Deterministic run on the simulated clock, paced if realtime_factor > 0.
    SessionResult run();
    /// One component per thread on the wall clock.
    SessionResult run_threaded();

    /// Thread-safe operator entry.
    CommandAck submit(const VelocityCommand& cmd);
    bool running() const { return running_; }
    double now() const;
    TelemetrySnapshot snapshot() const;
    /// Metrics over what has been recorded so far. Throws ArgumentError with
    /// too little overlap.
    TwinSyncMetrics metrics_to_date() const;

    /// Called on the session clock at snapshot_rate.
    void on_snapshot(std::function<void(const TelemetrySnapshot&)> sink) { sink_ = std::move(sink); }
    /// Called once when the run starts and stops.
    void on_event(std::function<void(const std::string& event, const std::string& text)> sink) {
        event_sink_ = std::move(sink);
    }

    const SessionConfig& config() const { return cfg_; }

private:
    void build(std::shared_ptr<const aero::AeroDatabase> db);
    void drive_script(double now);
    void maybe_kill(double now);
    void maybe_snapshot(double now);
    void relay_status();
    SessionResult collect(double duration);
    void emit(const std::string& event, const std::string& text);

    SessionConfig cfg_;
    std::unique_ptr<LoopbackLink> loopback_;
    DatagramChannel* digital_end_ = nullptr;
    DatagramChannel* physical_end_ = nullptr;
    std::unique_ptr<FaultyChannel> digital_rx_;   // uplink faults
    std::unique_ptr<FaultyChannel> physical_rx_;  // downlink faults
    std::unique_ptr<DigitalTwin> digital_;
    std::unique_ptr<Bridge> bridge_;
    std::unique_ptr<PhysicalTwin> physical_;
    std::size_t next_command_ = 0;
    std::optional<StreamScheduler> snapshots_;
    std::uint64_t snapshot_seq_ = 0;
    std::atomic<bool> running_{false};
    std::atomic<double> clock_{0.0};
    std::function<void(const TelemetrySnapshot&)> sink_;
    std::function<void(const std::string&, const std::string&)> event_sink_;
    mutable std::mutex snapshot_mutex_;
};

/// Writes digital.jsonl, physical.jsonl, sends.jsonl and metrics.json into
/// `dir`. Returns the written paths.
std::vector<std::filesystem::path> write_session_outputs(const SessionResult& r, const std::filesystem::path& dir);

} // namespace vdt::d2p
