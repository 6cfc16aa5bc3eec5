#include <vdt/common/errors.hpp>
#include <vdt/d2p/config.hpp>

#include <charconv>

namespace vdt::d2p {

Endpoint Endpoint::parse(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
        throw ArgumentError("endpoint '" + text + "' is not host:port");
    }
    unsigned port = 0;
    const char* first = text.data() + colon + 1;
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, port);
    if (ec != std::errc() || ptr != last || port > 65535) {
        throw ArgumentError("endpoint '" + text + "' has an invalid port");
    }
    return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

std::string Endpoint::str() const { return host + ":" + std::to_string(port); }

void BridgeConfig::validate() const {
    if (!(stream_rate > 0.0)) {
        throw ArgumentError("stream_rate must be positive");
    }
    if (!(velocity_limit > 0.0)) {
        throw ArgumentError("velocity_limit must be positive");
    }
    if (offboard_timeout_ms <= 0) {
        throw ArgumentError("offboard_timeout_ms must be positive");
    }
    if (!(heartbeat_rate > 0.0)) {
        throw ArgumentError("heartbeat_rate must be positive");
    }
}

nlohmann::json to_json(const BridgeConfig& c) {
    return {{"stream_rate", c.stream_rate},
            {"velocity_limit", c.velocity_limit},
            {"offboard_timeout_ms", c.offboard_timeout_ms},
            {"heartbeat_rate", c.heartbeat_rate},
            {"system_id", c.system_id},
            {"component_id", c.component_id},
            {"digital", c.digital.str()},
            {"physical", c.physical.str()},
            {"gateway", c.gateway.str()}};
}

BridgeConfig bridge_config_from_json(const nlohmann::json& j) {
    BridgeConfig c;
    c.stream_rate = j.value("stream_rate", c.stream_rate);
    c.velocity_limit = j.value("velocity_limit", c.velocity_limit);
    c.offboard_timeout_ms = j.value("offboard_timeout_ms", c.offboard_timeout_ms);
    c.heartbeat_rate = j.value("heartbeat_rate", c.heartbeat_rate);
    c.system_id = j.value("system_id", c.system_id);
    c.component_id = j.value("component_id", c.component_id);
    if (j.contains("digital")) {
        c.digital = Endpoint::parse(j.at("digital").get<std::string>());
    }
    if (j.contains("physical")) {
        c.physical = Endpoint::parse(j.at("physical").get<std::string>());
    }
    if (j.contains("gateway")) {
        c.gateway = Endpoint::parse(j.at("gateway").get<std::string>());
    }
    c.validate();
    return c;
}

} // namespace vdt::d2p
