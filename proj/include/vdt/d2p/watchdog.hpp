#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace vdt::d2p {

enum class OffboardStatus : std::uint8_t { Inactive = 0, Active = 1, Lost = 2 };

std::string_view to_string(OffboardStatus s);
std::optional<OffboardStatus> offboard_status_from_string(std::string_view s);

/// Offboard mode of the receiving twin. `last_setpoint_ms` is meaningful once
/// a setpoint has been accepted.
struct OffboardState {
    OffboardStatus status = OffboardStatus::Inactive;
    std::int64_t last_setpoint_ms = 0;
    std::int64_t lost_at_ms = 0;  // time of the last Active -> Lost transition

    bool operator==(const OffboardState&) const = default;
};

/// A valid setpoint arrived at `now_ms`: Active from any state.
OffboardState on_setpoint(OffboardState state, std::int64_t now_ms);

/// Active -> Lost once now - last_setpoint > timeout. Other states unchanged.
OffboardState offboard_watchdog(OffboardState state, std::int64_t now_ms, std::int64_t timeout_ms);

/// Log replay: true iff consecutive send times (or the tail up to `end_ms`)
/// contain a gap longer than the timeout.
bool send_log_has_gap(const std::vector<std::int64_t>& send_ms, std::int64_t end_ms, std::int64_t timeout_ms);

} // namespace vdt::d2p
