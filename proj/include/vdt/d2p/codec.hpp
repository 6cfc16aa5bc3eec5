#pragma once

#include <vdt/d2p/watchdog.hpp>
#include <vdt/sim/setpoint.hpp>
#include <vdt/vehicle/state.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace vdt::d2p {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kSync = 0xFD;
/// sync, length, sequence, system id, component id, message id (2).
inline constexpr std::size_t kHeaderSize = 7;
inline constexpr std::size_t kCrcSize = 2;
inline constexpr std::size_t kMaxPayload = 255;

enum class MessageId : std::uint16_t {
    Heartbeat = 0,
    Attitude = 30,
    LocalPosition = 32,
    SetpointLocalNed = 85,
};

using Float3 = std::array<float, 3>;

/// Liveness. The bridge sends it with an empty payload; the receiving twin
/// appends its offboard status byte.
struct Heartbeat {
    std::optional<OffboardStatus> offboard;

    bool operator==(const Heartbeat&) const = default;
};

/// Position/velocity/yaw target in local NED with ignore-bit type mask.
struct SetpointMessage {
    std::uint16_t type_mask = sim::mask::kIgnoreAll;
    Float3 position{};  // m
    Float3 velocity{};  // m/s
    float yaw = 0.0f;       // rad
    float yaw_rate = 0.0f;  // rad/s
    std::uint32_t timestamp_ms = 0;

    bool operator==(const SetpointMessage&) const = default;
};
inline constexpr std::size_t kSetpointPayloadSize = 38;

struct LocalPosition {
    std::uint32_t timestamp_ms = 0;
    Float3 position{};  // m, NED
    Float3 velocity{};  // m/s, NED

    bool operator==(const LocalPosition&) const = default;
};
inline constexpr std::size_t kLocalPositionPayloadSize = 28;

struct Attitude {
    std::uint32_t timestamp_ms = 0;
    float roll = 0.0f, pitch = 0.0f, yaw = 0.0f;  // rad
    Float3 rates{};                                // rad/s, body p q r

    bool operator==(const Attitude&) const = default;
};
inline constexpr std::size_t kAttitudePayloadSize = 28;

using Message = std::variant<Heartbeat, SetpointMessage, LocalPosition, Attitude>;

MessageId message_id(const Message& m);

struct Frame {
    std::uint8_t sequence = 0;
    std::uint8_t system_id = 1;
    std::uint8_t component_id = 1;
    Message message;

    bool operator==(const Frame&) const = default;
};

enum class DecodeError {
    ShortBuffer,     // fewer bytes than the header or the declared payload needs
    BadSync,         // first byte is not the sync marker
    LengthMismatch,  // datagram longer than the frame it declares
    BadCrc,
    UnknownMessage,  // CRC valid but the message id is not known
    BadPayloadSize,  // known id with a payload of the wrong size
};

std::string_view to_string(DecodeError e);

struct DecodeResult {
    std::optional<Frame> frame;
    std::optional<DecodeError> error;

    bool ok() const { return frame.has_value(); }
};

Bytes encode_payload(const Message& m);
/// Frame bytes: header, payload, CRC-16 (little-endian) over length..payload.
Bytes encode_frame(const Frame& f);
/// Decodes exactly one frame occupying the whole buffer (one frame per
/// datagram). Never throws.
DecodeResult decode_frame(std::span<const std::uint8_t> bytes);

/// Setpoint conversions. Acceleration is not carried on the wire, so its
/// ignore bits are always set on encode.
SetpointMessage to_message(const sim::Setpoint& sp);
sim::Setpoint to_setpoint(const SetpointMessage& m);

LocalPosition local_position_from(const vehicle::BodyState& s, std::uint32_t t_ms);
Attitude attitude_from(const vehicle::BodyState& s, std::uint32_t t_ms);

} // namespace vdt::d2p
