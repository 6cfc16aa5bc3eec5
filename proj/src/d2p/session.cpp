#include <vdt/common/errors.hpp>
#include <vdt/d2p/session.hpp>
#include <vdt/sim/telemetry.hpp>
#include <vdt/vehicle/dynamics.hpp>

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

namespace vdt::d2p {

namespace {

nlohmann::json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

nlohmann::json float3_json(const Float3& v) { return {v[0], v[1], v[2]}; }

Vec3 vec_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw ArgumentError("expected a 3-element array");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

using Clock = std::chrono::steady_clock;

void sleep_until_session_time(Clock::time_point start, double t, double factor) {
    const auto target = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(t / factor));
    std::this_thread::sleep_until(target);
}

double elapsed(Clock::time_point start, double factor) {
    return std::chrono::duration<double>(Clock::now() - start).count() * factor;
}

} // namespace

OperatorScript OperatorScript::square(double speed, double leg_duration, double lead) {
    if (!(speed >= 0.0) || !(leg_duration > 0.0) || !(lead >= 0.0)) {
        throw ArgumentError("square script needs speed >= 0, leg duration > 0 and lead >= 0");
    }
    OperatorScript s;
    s.commands.push_back({0.0, {}});
    const Vec3 dirs[] = {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
    double t = lead;
    for (const Vec3& d : dirs) {
        s.commands.push_back({t, {speed * d, 0.0}});
        t += leg_duration;
    }
    s.commands.push_back({t, {}});
    return s;
}

nlohmann::json to_json(const OperatorScript& s) {
    nlohmann::json cmds = nlohmann::json::array();
    for (const auto& c : s.commands) {
        cmds.push_back({{"t", c.t}, {"velocity", vec_json(c.command.velocity)}, {"yaw_rate", c.command.yaw_rate}});
    }
    return {{"commands", cmds}};
}

OperatorScript operator_script_from_json(const nlohmann::json& j) {
    OperatorScript s;
    double last = -INFINITY;
    for (const auto& c : j.at("commands")) {
        ScriptedCommand sc;
        sc.t = c.at("t").get<double>();
        sc.command.velocity = vec_from_json(c.at("velocity"));
        sc.command.yaw_rate = c.value("yaw_rate", 0.0);
        if (!(sc.t >= last)) {
            throw ArgumentError("operator script commands must be sorted by t");
        }
        last = sc.t;
        s.commands.push_back(sc);
    }
    return s;
}

nlohmann::json to_json(const TelemetrySnapshot& s) {
    const auto& d = s.digital;
    nlohmann::json physical = nullptr;
    if (s.physical.position) {
        physical = {{"t_ms", s.physical.position->timestamp_ms},
                    {"position", float3_json(s.physical.position->position)},
                    {"velocity", float3_json(s.physical.position->velocity)}};
        if (s.physical.attitude) {
            physical["attitude"] = {s.physical.attitude->roll, s.physical.attitude->pitch, s.physical.attitude->yaw};
        }
    }
    nlohmann::json active = {{"type_mask", d.active.type_mask}, {"velocity", vec_json(d.active.velocity)},
                             {"yaw_rate", d.active.yaw_rate}};
    return {{"type", "telemetry"},
            {"seq", s.sequence},
            {"timestamp", s.timestamp},
            {"digital",
             {{"position", vec_json(d.state.position_ned())},
              {"velocity", vec_json(vehicle::body_to_ned(d.state))},
              {"attitude", {d.state.phi, d.state.theta, d.state.psi}},
              {"rates", vec_json(d.state.rates())}}},
            {"active_setpoint", active},
            {"physical", physical},
            {"offboard", {{"state", to_string(s.physical.offboard)}, {"last_rx", s.physical.last_rx}}},
            {"clamp_flag", s.clamp_flag}};
}

PlantMismatch PlantMismatch::nominal() { return {1.04, 1.10, Vec3(0.8, -0.5, 0.0)}; }

nlohmann::json to_json(const PlantMismatch& m) {
    return {{"mass_scale", m.mass_scale}, {"inertia_scale", m.inertia_scale}, {"wind", vec_json(m.wind)}};
}

PlantMismatch plant_mismatch_from_json(const nlohmann::json& j) {
    PlantMismatch m;
    m.mass_scale = j.value("mass_scale", 1.0);
    m.inertia_scale = j.value("inertia_scale", 1.0);
    if (j.contains("wind")) {
        m.wind = vec_from_json(j.at("wind"));
    }
    return m;
}

SessionConfig::SessionConfig() { initial.pos_d = -10.0; }

void SessionConfig::validate() const {
    bridge.validate();
    sim.validate();
    downlink.validate();
    uplink.validate();
    if (!(duration > 0.0)) {
        throw ArgumentError("session duration must be positive");
    }
    if (!(snapshot_rate > 0.0)) {
        throw ArgumentError("snapshot rate must be positive");
    }
    if (!(physical_plant.mass_scale > 0.0) || !(physical_plant.inertia_scale > 0.0) ||
        !physical_plant.wind.allFinite()) {
        throw ArgumentError("plant mismatch needs positive scales and a finite wind");
    }
    if (!(realtime_factor >= 0.0)) {
        throw ArgumentError("realtime factor must be non-negative");
    }
}

nlohmann::json SessionResult::summary_json() const {
    nlohmann::json j = {{"duration", duration},
                        {"sends", sends},
                        {"unclamped_sends", unclamped_sends},
                        {"clamp_events", clamp_events},
                        {"missed_ticks", missed_ticks},
                        {"frames_received", frames_received},
                        {"duplicates", duplicates},
                        {"out_of_order", out_of_order},
                        {"lost_frames", lost_frames},
                        {"decode_errors", decode_errors},
                        {"unclamped_received", unclamped_received},
                        {"physical_tracking_rms", vec_json(physical_tracking_rms)},
                        {"kill_time", kill_time ? nlohmann::json(*kill_time) : nlohmann::json(nullptr)},
                        {"watchdog_trip_time",
                         watchdog_trip_time ? nlohmann::json(*watchdog_trip_time) : nlohmann::json(nullptr)},
                        {"metrics", metrics ? to_json(*metrics) : nlohmann::json(nullptr)}};
    if (!metrics_error.empty()) {
        j["metrics_error"] = metrics_error;
    }
    if (!error.empty()) {
        j["error"] = error;
    }
    return j;
}

TeleopSession::TeleopSession(SessionConfig cfg, std::shared_ptr<const aero::AeroDatabase> db)
    : cfg_(std::move(cfg)), loopback_(std::make_unique<LoopbackLink>()) {
    digital_end_ = &loopback_->a();
    physical_end_ = &loopback_->b();
    build(std::move(db));
}

TeleopSession::TeleopSession(SessionConfig cfg, std::shared_ptr<const aero::AeroDatabase> db,
                             DatagramChannel& digital_end, DatagramChannel& physical_end)
    : cfg_(std::move(cfg)), digital_end_(&digital_end), physical_end_(&physical_end) {
    build(std::move(db));
}

TeleopSession::~TeleopSession() = default;

void TeleopSession::build(std::shared_ptr<const aero::AeroDatabase> db) {
    cfg_.validate();
    digital_rx_ = std::make_unique<FaultyChannel>(*digital_end_, cfg_.uplink);
    physical_rx_ = std::make_unique<FaultyChannel>(*physical_end_, cfg_.downlink);
    const vehicle::VehicleParams params;
    digital_ = std::make_unique<DigitalTwin>(
        sim::Simulator(params, db, propulsion::RotorGeometry::symmetric_default(),
                       propulsion::ThrustCurve::wind_tunnel_default(), cfg_.sim),
        cfg_.bridge);
    bridge_ = std::make_unique<Bridge>(cfg_.bridge, *digital_rx_);

    // The physical airframe differs from the digital model by the mismatch.
    vehicle::VehicleParams plant = params;
    const auto& m = cfg_.physical_plant;
    plant.mass *= m.mass_scale;
    plant.Ixx *= m.inertia_scale;
    plant.Iyy *= m.inertia_scale;
    plant.Izz *= m.inertia_scale;
    plant.Ixz *= m.inertia_scale;
    sim::SimConfig plant_cfg = cfg_.sim;
    plant_cfg.wind += m.wind;
    physical_ = std::make_unique<PhysicalTwin>(
        sim::Simulator(plant, std::move(db), propulsion::RotorGeometry::symmetric_default(),
                       propulsion::ThrustCurve::wind_tunnel_default(), plant_cfg),
        cfg_.bridge, *physical_rx_);
    digital_->set_record_every(cfg_.record_every);
    physical_->set_record_every(cfg_.record_every);
    digital_->reset(cfg_.initial);
    physical_->reset(cfg_.initial);
    snapshots_.emplace(cfg_.snapshot_rate);
}

CommandAck TeleopSession::submit(const VelocityCommand& cmd) { return digital_->submit(cmd); }

double TeleopSession::now() const { return clock_.load(); }

TelemetrySnapshot TeleopSession::snapshot() const {
    TelemetrySnapshot s;
    s.digital = digital_->view();
    s.physical = bridge_->physical();
    s.timestamp = s.digital.t;
    s.clamp_flag = s.digital.last_command_clamped;
    return s;
}

TwinSyncMetrics TeleopSession::metrics_to_date() const {
    return compute_sync_metrics(digital_->trace(), physical_->trace());
}

void TeleopSession::drive_script(double now) {
    const auto& cmds = cfg_.script.commands;
    while (next_command_ < cmds.size() && cmds[next_command_].t <= now + 1e-9) {
        const CommandAck ack = digital_->submit(cmds[next_command_].command);
        if (!ack.accepted) {
            spdlog::warn("scripted command at t = {:.3f} s rejected: {}", cmds[next_command_].t, ack.reason);
        }
        ++next_command_;
    }
}

void TeleopSession::maybe_kill(double now) {
    if (cfg_.kill_stream_at && now + 1e-9 >= *cfg_.kill_stream_at) {
        bridge_->kill(now);
    }
}

void TeleopSession::relay_status() { digital_->set_physical_status(bridge_->physical().offboard); }

void TeleopSession::maybe_snapshot(double now) {
    if (!snapshots_->poll(now)) {
        return;
    }
    TelemetrySnapshot s = snapshot();
    {
        std::lock_guard lock(snapshot_mutex_);
        s.sequence = snapshot_seq_++;
    }
    if (sink_) {
        sink_(s);
    }
}

void TeleopSession::emit(const std::string& event, const std::string& text) {
    if (event_sink_) {
        event_sink_(event, text);
    }
}

SessionResult TeleopSession::run() {
    const double dt = cfg_.sim.dt;
    const auto steps = static_cast<std::int64_t>(std::llround(cfg_.duration / dt));
    const auto start = Clock::now();
    std::string error;
    running_ = true;
    emit("start", "");
    try {
        for (std::int64_t k = 0; k < steps; ++k) {
            const double now = static_cast<double>(k) * dt;
            clock_ = now;
            drive_script(now);
            maybe_kill(now);
            digital_->step();
            bridge_->poll(now, digital_->setpoint_queue());
            relay_status();
            physical_->step();
            maybe_snapshot(now + dt);
            if (cfg_.realtime_factor > 0.0) {
                sleep_until_session_time(start, now + dt, cfg_.realtime_factor);
            }
        }
    } catch (const Error& e) {
        error = e.what();
        spdlog::error("teleop session halted at t = {:.3f} s: {}", now(), error);
        emit("error", error);
    }
    running_ = false;
    digital_->stop();
    emit("stop", error);
    SessionResult r = collect(now() + dt);
    r.error = error;
    return r;
}

SessionResult TeleopSession::run_threaded() {
    const double factor = cfg_.realtime_factor > 0.0 ? cfg_.realtime_factor : 1.0;
    const double dt = cfg_.sim.dt;
    const double end = cfg_.duration;
    const auto start = Clock::now();
    std::mutex error_mutex;
    std::string error;
    std::atomic<bool> abort{false};
    auto guarded = [&](auto&& body) {
        return [&, body] {
            try {
                body();
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (error.empty()) {
                    error = e.what();
                }
                abort = true;
            }
        };
    };
    running_ = true;
    emit("start", "");

    std::thread digital(guarded([&] {
        while (!abort && digital_->time() + dt <= end + 1e-9) {
            const double now = digital_->time();
            sleep_until_session_time(start, now, factor);
            clock_ = now;
            drive_script(now);
            digital_->step();
            maybe_snapshot(digital_->time());
        }
    }));
    std::thread bridge(guarded([&] {
        const double period = 1.0 / (4.0 * cfg_.bridge.stream_rate);
        for (;;) {
            const double now = elapsed(start, factor);
            if (abort || now > end) {
                break;
            }
            maybe_kill(now);
            bridge_->poll(now, digital_->setpoint_queue());
            relay_status();
            sleep_until_session_time(start, now + period, factor);
        }
    }));
    std::thread physical(guarded([&] {
        while (!abort && physical_->time() + dt <= end + 1e-9) {
            sleep_until_session_time(start, physical_->time(), factor);
            physical_->step();
        }
    }));
    digital.join();
    bridge.join();
    physical.join();

    running_ = false;
    digital_->stop();
    if (!error.empty()) {
        spdlog::error("teleop session halted: {}", error);
        emit("error", error);
    }
    emit("stop", error);
    SessionResult r = collect(std::min(digital_->time(), physical_->time()));
    r.error = error;
    return r;
}

SessionResult TeleopSession::collect(double duration) {
    SessionResult r;
    r.duration = duration;
    r.send_log = bridge_->sends();
    r.sends = r.send_log.size();
    r.unclamped_sends = bridge_->unclamped_sends();
    r.missed_ticks = bridge_->missed_ticks();
    r.receive_log = physical_->receives();
    r.offboard_changes = physical_->status_changes();
    const auto& seq = physical_->sequence();
    r.frames_received = seq.received();
    r.duplicates = seq.duplicates();
    r.out_of_order = seq.out_of_order();
    r.lost_frames = seq.lost();
    r.decode_errors = physical_->decode_errors() + bridge_->decode_errors();
    r.unclamped_received = physical_->unclamped_received();
    r.physical_tracking_rms = physical_->tracking_rms();
    r.kill_time = bridge_->killed_at();
    if (r.kill_time) {
        for (const auto& c : r.offboard_changes) {
            if (c.to == OffboardStatus::Lost && c.t >= *r.kill_time) {
                r.watchdog_trip_time = c.t - *r.kill_time;
                break;
            }
        }
    }
    r.digital_trace = digital_->trace();
    r.physical_trace = physical_->trace();
    r.digital_log = digital_->log();
    r.physical_log = physical_->log();
    r.clamp_events = digital_->clamp_events();
    try {
        r.metrics = compute_sync_metrics(r.digital_trace, r.physical_trace);
    } catch (const ArgumentError& e) {
        r.metrics_error = e.what();
    }
    return r;
}

std::vector<std::filesystem::path> write_session_outputs(const SessionResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> out;
    const auto digital = dir / "digital.jsonl";
    const auto physical = dir / "physical.jsonl";
    sim::write_jsonl(digital, r.digital_log);
    sim::write_jsonl(physical, r.physical_log);
    out.push_back(digital);
    out.push_back(physical);

    const auto sends = dir / "sends.jsonl";
    {
        std::ofstream f(sends);
        if (!f) {
            throw Error("cannot write " + sends.string());
        }
        for (const auto& s : r.send_log) {
            const nlohmann::json j = {{"t", s.t},
                                      {"seq", s.sequence},
                                      {"type_mask", s.setpoint.type_mask},
                                      {"velocity", vec_json(s.setpoint.velocity)},
                                      {"yaw_rate", s.setpoint.yaw_rate},
                                      {"clamped", s.clamped}};
            f << j.dump() << '\n';
        }
    }
    out.push_back(sends);

    const auto metrics = dir / "metrics.json";
    {
        std::ofstream f(metrics);
        if (!f) {
            throw Error("cannot write " + metrics.string());
        }
        f << r.summary_json().dump(2) << '\n';
    }
    out.push_back(metrics);
    return out;
}

} // namespace vdt::d2p
