#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>

namespace vdt::d2p {

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    /// Parses "host:port". Throws ArgumentError.
    static Endpoint parse(const std::string& text);
    std::string str() const;

    bool operator==(const Endpoint&) const = default;
};

struct BridgeConfig {
    double stream_rate = 30.0;            // Hz
    double velocity_limit = 3.0;          // m/s
    std::int64_t offboard_timeout_ms = 500;
    double heartbeat_rate = 1.0;          // Hz
    std::uint8_t system_id = 1;
    std::uint8_t component_id = 1;
    Endpoint digital{"127.0.0.1", 14540};
    Endpoint physical{"127.0.0.1", 14541};
    Endpoint gateway{"127.0.0.1", 8765};

    /// Throws ArgumentError unless rates, limit and timeout are positive.
    void validate() const;
};

nlohmann::json to_json(const BridgeConfig& c);
/// Missing keys keep their defaults.
BridgeConfig bridge_config_from_json(const nlohmann::json& j);

} // namespace vdt::d2p
