#include <vdt/d2p/twins.hpp>
#include <vdt/vehicle/dynamics.hpp>

#include <spdlog/spdlog.h>

#include <cmath>

namespace vdt::d2p {

namespace {

TwinSample sample_of(const sim::Simulator& s) {
    return {s.time(), s.state().position_ned(), vehicle::body_to_ned(s.state())};
}

} // namespace

sim::Setpoint command_setpoint(const VelocityCommand& cmd, std::uint32_t t_ms) {
    sim::Setpoint sp = sim::Setpoint::velocity_only(cmd.velocity, t_ms);
    sp.type_mask = static_cast<std::uint16_t>(sp.type_mask & ~sim::mask::kIgnoreYawRate);
    sp.yaw_rate = cmd.yaw_rate;
    return sp;
}

std::int64_t to_ms(double t) { return static_cast<std::int64_t>(std::llround(t * 1000.0)); }

// ---------------------------------------------------------------------------
// DigitalTwin

DigitalTwin::DigitalTwin(sim::Simulator sim, const BridgeConfig& cfg, std::size_t command_capacity)
    : sim_(std::move(sim)), cfg_(cfg), commands_(command_capacity), published_(64) {
    cfg_.validate();
}

void DigitalTwin::reset(const vehicle::BodyState& initial) {
    sim_.reset(initial);
    const sim::Setpoint hold = sim::Setpoint::velocity_target(Vec3::Zero(), initial.psi);
    sim_.set_setpoint(hold);
    published_.drain();
    published_.push(hold);
    std::lock_guard lock(mutex_);
    view_ = View{};
    view_.state = initial;
    view_.active = hold;
    trace_.assign(1, sample_of(sim_));
    log_.assign(1, sim_.telemetry());
    steps_ = 0;
}

CommandAck DigitalTwin::submit(const VelocityCommand& cmd) {
    CommandAck ack;
    if (stopped_) {
        ack.reason = "session stopped";
        return ack;
    }
    if (!cmd.velocity.allFinite() || !std::isfinite(cmd.yaw_rate)) {
        ack.reason = "non-finite command";
        return ack;
    }
    if (physical_status_ == OffboardStatus::Lost) {
        ack.reason = "offboard lost";
        return ack;
    }
    const ClampResult c = clamp_setpoint(command_setpoint(cmd), cfg_.velocity_limit);
    commands_.push({c.setpoint, c.clamped});
    if (c.clamped) {
        ++clamp_events_;
    }
    ack.accepted = true;
    ack.velocity = c.setpoint.velocity;
    ack.yaw_rate = c.setpoint.yaw_rate;
    ack.clamped = c.clamped;
    return ack;
}

void DigitalTwin::step() {
    bool changed = false;
    bool clamped = false;
    std::uint64_t applied = 0;
    for (auto& [sp, was_clamped] : commands_.drain()) {
        sp.timestamp_ms = static_cast<std::uint32_t>(to_ms(sim_.time()));
        if (sim_.set_setpoint(sp)) {
            changed = true;
            clamped = was_clamped;
            ++applied;
        }
    }
    sim_.step();
    if (changed) {
        published_.push(*sim_.active_setpoint());
    }
    ++steps_;
    std::lock_guard lock(mutex_);
    view_.t = sim_.time();
    view_.state = sim_.state();
    view_.active = *sim_.active_setpoint();
    if (changed) {
        view_.last_command_clamped = clamped;
    }
    view_.commands_applied += applied;
    trace_.push_back(sample_of(sim_));
    if (steps_ % record_every_ == 0) {
        log_.push_back(sim_.telemetry());
    }
}

DigitalTwin::View DigitalTwin::view() const {
    std::lock_guard lock(mutex_);
    return view_;
}

TwinTrace DigitalTwin::trace() const {
    std::lock_guard lock(mutex_);
    return trace_;
}

std::vector<sim::TelemetryRecord> DigitalTwin::log() const {
    std::lock_guard lock(mutex_);
    return log_;
}

// ---------------------------------------------------------------------------
// Bridge

Bridge::Bridge(const BridgeConfig& cfg, DatagramChannel& link, double t0)
    : cfg_(cfg), link_(link), scheduler_(cfg.stream_rate, t0), heartbeat_(cfg.heartbeat_rate, t0) {
    cfg_.validate();
}

void Bridge::send_frame(const Message& m, double now) {
    Frame f;
    f.sequence = sequence_++;
    f.system_id = cfg_.system_id;
    f.component_id = cfg_.component_id;
    f.message = m;
    link_.send(encode_frame(f), now);
}

bool Bridge::poll(double now, BoundedQueue<sim::Setpoint>& source) {
    for (auto& sp : source.drain()) {
        latest_ = sp;
    }
    bool sent = false;
    if (!killed_ && latest_ && scheduler_.poll(now)) {
        const ClampResult c = clamp_setpoint(*latest_, cfg_.velocity_limit);
        SetpointMessage msg = to_message(c.setpoint);
        msg.timestamp_ms = static_cast<std::uint32_t>(to_ms(now));
        const std::uint8_t seq = sequence_;
        send_frame(msg, now);
        const sim::Setpoint on_wire = to_setpoint(msg);
        std::lock_guard lock(mutex_);
        sends_.push_back({now, seq, on_wire, c.clamped});
        if (c.clamped) {
            ++clamp_events_;
        }
        if (!within_limit(on_wire, cfg_.velocity_limit)) {
            ++unclamped_;
        }
        sent = true;
    }
    if (!killed_ && heartbeat_.poll(now)) {
        send_frame(Heartbeat{}, now);
    }
    for (const auto& d : link_.receive(now)) {
        const DecodeResult r = decode_frame(d);
        if (!r.ok()) {
            std::lock_guard lock(mutex_);
            ++decode_errors_;
            continue;
        }
        handle(*r.frame, now);
    }
    return sent;
}

void Bridge::handle(const Frame& f, double now) {
    rx_seq_.observe(f.sequence);
    std::lock_guard lock(mutex_);
    if (const auto* hb = std::get_if<Heartbeat>(&f.message)) {
        if (hb->offboard) {
            physical_.offboard = *hb->offboard;
        }
    } else if (const auto* lp = std::get_if<LocalPosition>(&f.message)) {
        physical_.position = *lp;
    } else if (const auto* at = std::get_if<Attitude>(&f.message)) {
        physical_.attitude = *at;
    }
    physical_.last_rx = now;
}

void Bridge::kill(double now) {
    if (!killed_) {
        killed_ = true;
        killed_at_ = now;
        spdlog::info("bridge stream killed at t = {:.3f} s", now);
    }
}

PhysicalView Bridge::physical() const {
    std::lock_guard lock(mutex_);
    return physical_;
}

std::vector<SendRecord> Bridge::sends() const {
    std::lock_guard lock(mutex_);
    return sends_;
}

std::uint64_t Bridge::send_count() const {
    std::lock_guard lock(mutex_);
    return sends_.size();
}

std::uint64_t Bridge::unclamped_sends() const {
    std::lock_guard lock(mutex_);
    return unclamped_;
}

std::uint64_t Bridge::clamp_events() const {
    std::lock_guard lock(mutex_);
    return clamp_events_;
}

std::uint64_t Bridge::decode_errors() const {
    std::lock_guard lock(mutex_);
    return decode_errors_;
}

// ---------------------------------------------------------------------------
// PhysicalTwin

PhysicalTwin::PhysicalTwin(sim::Simulator sim, const BridgeConfig& cfg, DatagramChannel& link)
    : sim_(std::move(sim)), cfg_(cfg), link_(link), report_(cfg.stream_rate) {
    cfg_.validate();
}

void PhysicalTwin::reset(const vehicle::BodyState& initial) {
    sim_.reset(initial);
    sim_.set_setpoint(sim::Setpoint::position_target(initial.position_ned(), initial.psi));
    report_ = StreamScheduler(cfg_.stream_rate, sim_.time());
    std::lock_guard lock(mutex_);
    offboard_ = OffboardState{};
    receives_.clear();
    changes_.clear();
    trace_.assign(1, sample_of(sim_));
    log_.assign(1, sim_.telemetry());
    steps_ = 0;
    tracking_sq_.setZero();
    tracking_n_ = 0;
}

void PhysicalTwin::send_frame(const Message& m, double now) {
    Frame f;
    f.sequence = sequence_++;
    f.system_id = cfg_.system_id;
    f.component_id = static_cast<std::uint8_t>(cfg_.component_id + 1);
    f.message = m;
    link_.send(encode_frame(f), now);
}

void PhysicalTwin::set_status(OffboardStatus s, double now) {
    // Caller holds mutex_.
    if (offboard_.status != s) {
        changes_.push_back({now, offboard_.status, s});
        offboard_.status = s;
    }
}

void PhysicalTwin::handle(const Frame& f, double now) {
    const auto verdict = rx_seq_.observe(f.sequence);
    if (verdict == SequenceTracker::Verdict::Duplicate || verdict == SequenceTracker::Verdict::Late) {
        return;  // never apply a stale setpoint
    }
    const auto* msg = std::get_if<SetpointMessage>(&f.message);
    if (msg == nullptr) {
        return;
    }
    const sim::Setpoint sp = to_setpoint(*msg);
    std::lock_guard lock(mutex_);
    if (!within_limit(sp, cfg_.velocity_limit)) {
        ++unclamped_;
        return;
    }
    if (!sim_.set_setpoint(sp)) {
        return;
    }
    const OffboardStatus before = offboard_.status;
    offboard_ = on_setpoint(offboard_, to_ms(now));
    if (before != OffboardStatus::Active) {
        changes_.push_back({now, before, OffboardStatus::Active});
    }
    receives_.push_back({now, f.sequence, sp});
}

void PhysicalTwin::step() {
    const double now = sim_.time();
    for (const auto& d : link_.receive(now)) {
        const DecodeResult r = decode_frame(d);
        if (!r.ok()) {
            std::lock_guard lock(mutex_);
            ++decode_errors_[std::string(to_string(*r.error))];
            continue;
        }
        handle(*r.frame, now);
    }
    {
        std::lock_guard lock(mutex_);
        const OffboardState next = offboard_watchdog(offboard_, to_ms(now), cfg_.offboard_timeout_ms);
        if (next.status == OffboardStatus::Lost && offboard_.status != OffboardStatus::Lost) {
            const auto& s = sim_.state();
            sim_.set_setpoint(sim::Setpoint::position_target(s.position_ned(), s.psi));
            offboard_.lost_at_ms = next.lost_at_ms;
            set_status(OffboardStatus::Lost, now);
            spdlog::warn("physical twin: offboard lost at t = {:.3f} s, holding position", now);
        }
    }
    sim_.step();
    ++steps_;
    OffboardStatus status;
    {
        std::lock_guard lock(mutex_);
        status = offboard_.status;
        const auto& sp = sim_.active_setpoint();
        if (status == OffboardStatus::Active && sp && sp->uses_velocity(0)) {
            const Vec3 e = vehicle::body_to_ned(sim_.state()) - sp->velocity;
            tracking_sq_ += e.cwiseProduct(e);
            ++tracking_n_;
        }
        trace_.push_back(sample_of(sim_));
        if (steps_ % record_every_ == 0) {
            log_.push_back(sim_.telemetry());
        }
    }
    const double t = sim_.time();
    if (report_.poll(t)) {
        const auto t_ms = static_cast<std::uint32_t>(to_ms(t));
        send_frame(local_position_from(sim_.state(), t_ms), t);
        send_frame(attitude_from(sim_.state(), t_ms), t);
        send_frame(Heartbeat{status}, t);
    }
}

OffboardState PhysicalTwin::offboard() const {
    std::lock_guard lock(mutex_);
    return offboard_;
}

std::vector<ReceiveRecord> PhysicalTwin::receives() const {
    std::lock_guard lock(mutex_);
    return receives_;
}

std::vector<StatusChange> PhysicalTwin::status_changes() const {
    std::lock_guard lock(mutex_);
    return changes_;
}

TwinTrace PhysicalTwin::trace() const {
    std::lock_guard lock(mutex_);
    return trace_;
}

std::vector<sim::TelemetryRecord> PhysicalTwin::log() const {
    std::lock_guard lock(mutex_);
    return log_;
}

std::uint64_t PhysicalTwin::decode_errors() const {
    std::lock_guard lock(mutex_);
    std::uint64_t n = 0;
    for (const auto& [k, v] : decode_errors_) {
        n += v;
    }
    return n;
}

std::map<std::string, std::uint64_t> PhysicalTwin::decode_error_counts() const {
    std::lock_guard lock(mutex_);
    return decode_errors_;
}

std::uint64_t PhysicalTwin::unclamped_received() const {
    std::lock_guard lock(mutex_);
    return unclamped_;
}

Vec3 PhysicalTwin::tracking_rms() const {
    std::lock_guard lock(mutex_);
    return tracking_n_ > 0 ? Vec3((tracking_sq_ / static_cast<double>(tracking_n_)).cwiseSqrt()) : Vec3::Zero();
}

} // namespace vdt::d2p
