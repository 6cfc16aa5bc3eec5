#include <vdt/d2p/codec.hpp>
#include <vdt/d2p/crc.hpp>
#include <vdt/vehicle/dynamics.hpp>

#include <bit>
#include <cmath>

namespace vdt::d2p {

namespace {

class Writer {
public:
    explicit Writer(Bytes& out) : out_(out) {}
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v & 0xFF));
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            out_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
        }
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f32x3(const Float3& v) {
        for (float x : v) {
            f32(x);
        }
    }

private:
    Bytes& out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
    std::uint8_t u8() { return in_[pos_++]; }
    std::uint16_t u16() {
        const std::uint16_t v = static_cast<std::uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(in_[pos_ + i]) << (8 * i);
        }
        pos_ += 4;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    Float3 f32x3() { return {f32(), f32(), f32()}; }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

Float3 to_float3(const Vec3& v) {
    return {static_cast<float>(v.x()), static_cast<float>(v.y()), static_cast<float>(v.z())};
}

Vec3 to_vec3(const Float3& v) { return {v[0], v[1], v[2]}; }

std::optional<Message> decode_payload(MessageId id, std::span<const std::uint8_t> p, DecodeError& err) {
    Reader r(p);
    switch (id) {
    case MessageId::Heartbeat: {
        if (p.empty()) {
            return Heartbeat{};
        }
        if (p.size() == 1 && p[0] <= static_cast<std::uint8_t>(OffboardStatus::Lost)) {
            return Heartbeat{static_cast<OffboardStatus>(p[0])};
        }
        break;
    }
    case MessageId::SetpointLocalNed: {
        if (p.size() != kSetpointPayloadSize) {
            break;
        }
        SetpointMessage m;
        m.type_mask = r.u16();
        m.position = r.f32x3();
        m.velocity = r.f32x3();
        m.yaw = r.f32();
        m.yaw_rate = r.f32();
        m.timestamp_ms = r.u32();
        return m;
    }
    case MessageId::LocalPosition: {
        if (p.size() != kLocalPositionPayloadSize) {
            break;
        }
        LocalPosition m;
        m.timestamp_ms = r.u32();
        m.position = r.f32x3();
        m.velocity = r.f32x3();
        return m;
    }
    case MessageId::Attitude: {
        if (p.size() != kAttitudePayloadSize) {
            break;
        }
        Attitude m;
        m.timestamp_ms = r.u32();
        m.roll = r.f32();
        m.pitch = r.f32();
        m.yaw = r.f32();
        m.rates = r.f32x3();
        return m;
    }
    default:
        err = DecodeError::UnknownMessage;
        return std::nullopt;
    }
    err = DecodeError::BadPayloadSize;
    return std::nullopt;
}

} // namespace

MessageId message_id(const Message& m) {
    struct Visitor {
        MessageId operator()(const Heartbeat&) const { return MessageId::Heartbeat; }
        MessageId operator()(const SetpointMessage&) const { return MessageId::SetpointLocalNed; }
        MessageId operator()(const LocalPosition&) const { return MessageId::LocalPosition; }
        MessageId operator()(const Attitude&) const { return MessageId::Attitude; }
    };
    return std::visit(Visitor{}, m);
}

std::string_view to_string(DecodeError e) {
    switch (e) {
    case DecodeError::ShortBuffer:
        return "short buffer";
    case DecodeError::BadSync:
        return "bad sync";
    case DecodeError::LengthMismatch:
        return "length mismatch";
    case DecodeError::BadCrc:
        return "bad crc";
    case DecodeError::UnknownMessage:
        return "unknown message id";
    case DecodeError::BadPayloadSize:
        return "bad payload size";
    }
    return "unknown";
}

Bytes encode_payload(const Message& m) {
    Bytes out;
    Writer w(out);
    if (const auto* hb = std::get_if<Heartbeat>(&m)) {
        if (hb->offboard) {
            w.u8(static_cast<std::uint8_t>(*hb->offboard));
        }
    } else if (const auto* sp = std::get_if<SetpointMessage>(&m)) {
        w.u16(sp->type_mask);
        w.f32x3(sp->position);
        w.f32x3(sp->velocity);
        w.f32(sp->yaw);
        w.f32(sp->yaw_rate);
        w.u32(sp->timestamp_ms);
    } else if (const auto* lp = std::get_if<LocalPosition>(&m)) {
        w.u32(lp->timestamp_ms);
        w.f32x3(lp->position);
        w.f32x3(lp->velocity);
    } else if (const auto* at = std::get_if<Attitude>(&m)) {
        w.u32(at->timestamp_ms);
        w.f32(at->roll);
        w.f32(at->pitch);
        w.f32(at->yaw);
        w.f32x3(at->rates);
    }
    return out;
}

Bytes encode_frame(const Frame& f) {
    const Bytes payload = encode_payload(f.message);
    Bytes out;
    out.reserve(kHeaderSize + payload.size() + kCrcSize);
    Writer w(out);
    w.u8(kSync);
    w.u8(static_cast<std::uint8_t>(payload.size()));
    w.u8(f.sequence);
    w.u8(f.system_id);
    w.u8(f.component_id);
    w.u16(static_cast<std::uint16_t>(message_id(f.message)));
    out.insert(out.end(), payload.begin(), payload.end());
    w.u16(crc16_ccitt_false(std::span(out).subspan(1)));
    return out;
}

DecodeResult decode_frame(std::span<const std::uint8_t> bytes) {
    DecodeResult result;
    if (bytes.size() < kHeaderSize + kCrcSize) {
        result.error = DecodeError::ShortBuffer;
        return result;
    }
    if (bytes[0] != kSync) {
        result.error = DecodeError::BadSync;
        return result;
    }
    const std::size_t len = bytes[1];
    const std::size_t total = kHeaderSize + len + kCrcSize;
    if (bytes.size() < total) {
        result.error = DecodeError::ShortBuffer;
        return result;
    }
    if (bytes.size() > total) {
        result.error = DecodeError::LengthMismatch;
        return result;
    }
    const std::uint16_t expected = crc16_ccitt_false(bytes.subspan(1, kHeaderSize - 1 + len));
    const std::uint16_t got = static_cast<std::uint16_t>(bytes[total - 2] | (bytes[total - 1] << 8));
    if (expected != got) {
        result.error = DecodeError::BadCrc;
        return result;
    }
    Frame f;
    f.sequence = bytes[2];
    f.system_id = bytes[3];
    f.component_id = bytes[4];
    const auto id = static_cast<MessageId>(bytes[5] | (bytes[6] << 8));
    DecodeError err = DecodeError::BadPayloadSize;
    auto msg = decode_payload(id, bytes.subspan(kHeaderSize, len), err);
    if (!msg) {
        result.error = err;
        return result;
    }
    f.message = std::move(*msg);
    result.frame = std::move(f);
    return result;
}

SetpointMessage to_message(const sim::Setpoint& sp) {
    SetpointMessage m;
    m.type_mask = static_cast<std::uint16_t>(sp.type_mask | sim::mask::kIgnoreAcceleration);
    m.position = to_float3(sp.position);
    m.velocity = to_float3(sp.velocity);
    m.yaw = static_cast<float>(sp.yaw);
    m.yaw_rate = static_cast<float>(sp.yaw_rate);
    m.timestamp_ms = sp.timestamp_ms;
    return m;
}

sim::Setpoint to_setpoint(const SetpointMessage& m) {
    sim::Setpoint sp;
    sp.type_mask = m.type_mask;
    sp.frame = sim::kFrameLocalNed;
    sp.position = to_vec3(m.position);
    sp.velocity = to_vec3(m.velocity);
    sp.yaw = m.yaw;
    sp.yaw_rate = m.yaw_rate;
    sp.timestamp_ms = m.timestamp_ms;
    return sp;
}

LocalPosition local_position_from(const vehicle::BodyState& s, std::uint32_t t_ms) {
    LocalPosition m;
    m.timestamp_ms = t_ms;
    m.position = to_float3(s.position_ned());
    m.velocity = to_float3(vehicle::body_to_ned(s));
    return m;
}

Attitude attitude_from(const vehicle::BodyState& s, std::uint32_t t_ms) {
    Attitude m;
    m.timestamp_ms = t_ms;
    m.roll = static_cast<float>(s.phi);
    m.pitch = static_cast<float>(s.theta);
    m.yaw = static_cast<float>(s.psi);
    m.rates = to_float3(s.rates());
    return m;
}

} // namespace vdt::d2p
