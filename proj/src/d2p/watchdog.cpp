#include <vdt/d2p/watchdog.hpp>

namespace vdt::d2p {

std::string_view to_string(OffboardStatus s) {
    switch (s) {
    case OffboardStatus::Inactive:
        return "inactive";
    case OffboardStatus::Active:
        return "active";
    case OffboardStatus::Lost:
        return "lost";
    }
    return "inactive";
}

std::optional<OffboardStatus> offboard_status_from_string(std::string_view s) {
    for (auto st : {OffboardStatus::Inactive, OffboardStatus::Active, OffboardStatus::Lost}) {
        if (to_string(st) == s) {
            return st;
        }
    }
    return std::nullopt;
}

OffboardState on_setpoint(OffboardState state, std::int64_t now_ms) {
    state.status = OffboardStatus::Active;
    state.last_setpoint_ms = now_ms;
    return state;
}

OffboardState offboard_watchdog(OffboardState state, std::int64_t now_ms, std::int64_t timeout_ms) {
    if (state.status == OffboardStatus::Active && now_ms - state.last_setpoint_ms > timeout_ms) {
        state.status = OffboardStatus::Lost;
        state.lost_at_ms = now_ms;
    }
    return state;
}

bool send_log_has_gap(const std::vector<std::int64_t>& send_ms, std::int64_t end_ms, std::int64_t timeout_ms) {
    for (std::size_t i = 1; i < send_ms.size(); ++i) {
        if (send_ms[i] - send_ms[i - 1] > timeout_ms) {
            return true;
        }
    }
    return !send_ms.empty() && end_ms - send_ms.back() > timeout_ms;
}

} // namespace vdt::d2p
