#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vdt/aero/synthetic.hpp>
#include <vdt/common/errors.hpp>
#include <vdt/gateway/gateway.hpp>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <cmath>
#include <optional>
#include <thread>

using namespace vdt;
using namespace vdt::gateway;
using nlohmann::json;

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using Clock = std::chrono::steady_clock;

namespace {

/// Minimal WebSocket client with bounded waits.
class TestClient {
public:
    explicit TestClient(std::uint16_t port, std::optional<int> receive_buffer = std::nullopt) {
        tcp::socket& sock = ws_.next_layer();
        sock.open(tcp::v4());
        if (receive_buffer) {
            sock.set_option(net::socket_base::receive_buffer_size(*receive_buffer));
        }
        sock.connect({net::ip::make_address("127.0.0.1"), port});
        ws_.handshake("127.0.0.1", "/session");
    }

    void send(const json& j) { ws_.write(net::buffer(j.dump())); }

    std::optional<json> read(std::chrono::milliseconds timeout = std::chrono::milliseconds(2000)) {
        std::optional<json> out;
        bool done = false;
        ws_.async_read(buffer_, [&](beast::error_code ec, std::size_t) {
            done = true;
            if (!ec) {
                out = json::parse(beast::buffers_to_string(buffer_.data()));
            }
            buffer_.consume(buffer_.size());
        });
        io_.restart();
        io_.run_for(timeout);
        if (!done) {
            beast::error_code ignored;
            ws_.next_layer().cancel(ignored);
            io_.restart();
            io_.run();
        }
        return out;
    }

    /// Reads until a message of `type` arrives.
    std::optional<json> read_type(const std::string& type,
                                  std::chrono::milliseconds timeout = std::chrono::milliseconds(3000)) {
        const auto deadline = Clock::now() + timeout;
        while (Clock::now() < deadline) {
            auto m = read(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()));
            if (!m) {
                return std::nullopt;
            }
            if ((*m)["type"] == type) {
                return m;
            }
        }
        return std::nullopt;
    }

private:
    net::io_context io_;
    websocket::stream<tcp::socket> ws_{io_};
    beast::flat_buffer buffer_;
};

std::pair<int, json> http_get(std::uint16_t port, const std::string& target) {
    net::io_context io;
    tcp::socket sock(io);
    sock.connect({net::ip::make_address("127.0.0.1"), port});
    http::request<http::empty_body> req{http::verb::get, target, 11};
    req.set(http::field::host, "127.0.0.1");
    http::write(sock, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(sock, buf, res);
    return {static_cast<int>(res.result_int()), json::parse(res.body())};
}

template <class Pred>
bool wait_for(Pred pred, std::chrono::milliseconds timeout = std::chrono::milliseconds(3000)) {
    const auto deadline = Clock::now() + timeout;
    while (Clock::now() < deadline) {
        if (pred()) {
            return true;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    return pred();
}

std::shared_ptr<const aero::AeroDatabase> reference_db() {
    static const auto db = std::make_shared<const aero::AeroDatabase>(aero::make_reference_database());
    return db;
}

GatewayOptions ephemeral() {
    GatewayOptions o;
    o.bind = {"127.0.0.1", 0};
    return o;
}

d2p::TelemetrySnapshot dummy_snapshot(std::uint64_t seq) {
    d2p::TelemetrySnapshot s;
    s.sequence = seq;
    s.timestamp = 0.1 * static_cast<double>(seq);
    return s;
}

} // namespace

TEST_CASE("command parsing and ack shape") {
    const auto req = parse_command(json::parse(R"({"type":"command","id":7,"velocity":[5,0,-1],"yaw_rate":0.2})"));
    CHECK(req.id == 7);
    CHECK(req.command.velocity == Vec3(5, 0, -1));
    CHECK(req.command.yaw_rate == 0.2);
    CHECK(parse_command(json::parse(R"({"velocity":[0,0,0]})")).command.yaw_rate == 0.0);
    CHECK_THROWS_AS(parse_command(json::parse(R"({"velocity":[1,2]})")), ArgumentError);
    CHECK_THROWS_AS(parse_command(json::parse(R"({"velocity":[1,"a",2]})")), ArgumentError);
    CHECK_THROWS_AS(parse_command(json::parse(R"({"velocity":[1,2,3],"yaw_rate":"x"})")), ArgumentError);

    d2p::CommandAck ok;
    ok.accepted = true;
    ok.velocity = Vec3(3, 0, 0);
    ok.clamped = true;
    const json a = ack_json(7, ok);
    CHECK(a["type"] == "ack");
    CHECK(a["velocity"] == json::array({3.0, 0.0, 0.0}));
    CHECK(a["clamped"] == true);
    d2p::CommandAck no;
    no.reason = "offboard lost";
    CHECK(ack_json("x", no)["reason"] == "offboard lost");
    CHECK(event_json("start", "")["type"] == "session");
}

TEST_CASE("http endpoints without a session") {
    Gateway gw(ephemeral());
    gw.start();
    REQUIRE(gw.port() != 0);
    auto [code, health] = http_get(gw.port(), "/health");
    CHECK(code == 200);
    CHECK(health["status"] == "ok");
    CHECK(health["session"] == "idle");
    CHECK(health["clients"] == 0);
    CHECK(health["uptime"].get<double>() >= 0.0);
    auto [mcode, metrics] = http_get(gw.port(), "/session/metrics");
    CHECK(mcode == 503);
    CHECK(metrics.contains("error"));
    CHECK(http_get(gw.port(), "/elsewhere").first == 404);

    TestClient c(gw.port());
    REQUIRE(wait_for([&] { return gw.client_count() == 1; }));
    c.send({{"type", "command"}, {"id", 1}, {"velocity", {1, 0, 0}}});
    const auto ack = c.read_type("ack");
    REQUIRE(ack);
    CHECK((*ack)["accepted"] == false);
    CHECK((*ack)["reason"] == "no session");
    c.send({{"type", "bogus"}});
    CHECK(c.read_type("error").has_value());
    gw.stop();
}

TEST_CASE("bind conflict is a transport error") {
    Gateway a(ephemeral());
    a.start();
    GatewayOptions o;
    o.bind = {"127.0.0.1", a.port()};
    Gateway b(o);
    CHECK_THROWS_AS(b.start(), TransportError);
}

TEST_CASE("two clients receive identical 10 Hz snapshot streams") {
    d2p::SessionConfig cfg;
    cfg.duration = 5.0;
    cfg.realtime_factor = 1.0;
    cfg.script = d2p::OperatorScript::square(2.0, 1.0, 0.5);
    d2p::TeleopSession session(cfg, reference_db());
    Gateway gw(ephemeral());
    gw.attach(session);
    gw.start();
    TestClient a(gw.port());
    TestClient b(gw.port());
    REQUIRE(wait_for([&] { return gw.client_count() == 2; }));

    std::thread runner([&] { session.run(); });
    auto collect = [](TestClient& c) {
        std::vector<json> snaps;
        std::vector<std::string> events;
        while (auto m = c.read(std::chrono::milliseconds(4000))) {
            if ((*m)["type"] == "telemetry") {
                snaps.push_back(*m);
            } else if ((*m)["type"] == "session") {
                events.push_back((*m)["event"]);
                if (events.back() == "stop") {
                    break;
                }
            }
        }
        return std::make_pair(snaps, events);
    };
    // Read b on a helper thread so neither client's backlog grows.
    std::pair<std::vector<json>, std::vector<std::string>> rb;
    std::thread reader([&] { rb = collect(b); });
    const auto ra = collect(a);
    reader.join();
    runner.join();

    MESSAGE("client a got " << ra.first.size() << " snapshots");
    CHECK(std::abs(static_cast<int>(ra.first.size()) - 50) <= 5);
    CHECK(ra.first == rb.first);
    CHECK(ra.second == std::vector<std::string>{"start", "stop"});
    for (std::size_t i = 1; i < ra.first.size(); ++i) {
        CHECK(ra.first[i]["timestamp"].get<double>() > ra.first[i - 1]["timestamp"].get<double>());
    }
    REQUIRE_FALSE(ra.first.empty());
    const json& last = ra.first.back();
    CHECK(last["digital"]["position"].size() == 3);
    CHECK(last["physical"].is_object());
    CHECK(last["offboard"]["state"] == "active");
    CHECK(last.contains("clamp_flag"));
    CHECK(gw.snapshots_published() == ra.first.size());

    const auto [code, health] = http_get(gw.port(), "/health");
    CHECK(code == 200);
    CHECK(health["session"] == "stopped");
    CHECK(health["clients"] == 2);
    gw.stop();
}

TEST_CASE("a gateway with no clients does not perturb the session") {
    d2p::SessionConfig cfg;
    cfg.duration = 8.0;
    cfg.script = d2p::OperatorScript::square(4.0, 1.5);
    const auto plain = d2p::TeleopSession(cfg, reference_db()).run();
    d2p::TeleopSession observed(cfg, reference_db());
    Gateway gw(ephemeral());
    gw.attach(observed);
    gw.start();
    const auto with_gateway = observed.run();
    CHECK(plain.summary_json() == with_gateway.summary_json());
    CHECK(gw.snapshots_published() == 81);  // 10 Hz grid including both ends
    gw.stop();
}

TEST_CASE("slow clients are dropped after a bounded backlog") {
    GatewayOptions o = ephemeral();
    o.send_buffer_bytes = 4096;
    Gateway gw(o);
    gw.start();
    TestClient slow(gw.port(), 4096);
    REQUIRE(wait_for([&] { return gw.client_count() == 1; }));
    for (std::uint64_t i = 0; i < 5000 && gw.dropped_clients() == 0; ++i) {
        gw.publish_snapshot(dummy_snapshot(i));
    }
    CHECK(wait_for([&] { return gw.dropped_clients() == 1; }));
    CHECK(wait_for([&] { return gw.client_count() == 0; }));
    // The gateway keeps serving.
    TestClient fresh(gw.port());
    REQUIRE(wait_for([&] { return gw.client_count() == 1; }));
    gw.publish_snapshot(dummy_snapshot(9999));
    const auto m = fresh.read_type("telemetry");
    REQUIRE(m);
    CHECK((*m)["seq"] == 9999);
    gw.stop();
}

TEST_CASE("live commands: clamp ack, causality, lost rejection, metrics") {
    d2p::SessionConfig cfg;
    cfg.duration = 6.5;
    cfg.realtime_factor = 1.0;
    cfg.kill_stream_at = 5.0;
    d2p::TeleopSession session(cfg, reference_db());
    Gateway gw(ephemeral());
    gw.attach(session);
    gw.start();
    TestClient c(gw.port());
    REQUIRE(wait_for([&] { return gw.client_count() == 1; }));
    std::thread runner([&] { session.run_threaded(); });
    REQUIRE(c.read_type("telemetry"));

    c.send({{"type", "command"}, {"id", "over"}, {"velocity", {5, 0, 0}}, {"yaw_rate", 0.0}});
    const auto clamped = c.read_type("ack");
    REQUIRE(clamped);
    CHECK((*clamped)["id"] == "over");
    CHECK((*clamped)["accepted"] == true);
    CHECK((*clamped)["clamped"] == true);
    CHECK((*clamped)["velocity"][0].get<double>() == doctest::Approx(3.0));
    CHECK((*clamped)["velocity"][1].get<double>() == 0.0);

    c.send({{"type", "command"}, {"id", "hover"}, {"velocity", {0, 0, 0}}});
    const auto hover = c.read_type("ack");
    REQUIRE(hover);
    CHECK((*hover)["accepted"] == true);
    CHECK((*hover)["clamped"] == false);

    // Causality: the new active setpoint shows up in a snapshot within 200 ms.
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    const auto sent = Clock::now();
    c.send({{"type", "command"}, {"id", "east"}, {"velocity", {0, 1.5, 0}}});
    std::optional<double> latency;
    while (auto m = c.read(std::chrono::milliseconds(1000))) {
        if ((*m)["type"] == "telemetry" && (*m)["active_setpoint"]["velocity"][1].get<double>() == 1.5) {
            latency = std::chrono::duration<double>(Clock::now() - sent).count();
            break;
        }
    }
    REQUIRE(latency);
    MESSAGE("command to snapshot latency " << *latency * 1000.0 << " ms");
    CHECK(*latency < 0.2);

    // After the stream kill the watchdog trips and commands are refused.
    std::optional<json> refused;
    const auto deadline = Clock::now() + std::chrono::seconds(8);
    while (!refused && Clock::now() < deadline) {
        c.send({{"type", "command"}, {"id", "late"}, {"velocity", {1, 0, 0}}});
        const auto ack = c.read_type("ack");
        if (ack && (*ack)["accepted"] == false) {
            refused = ack;
        } else {
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
    }
    runner.join();
    REQUIRE(refused);
    CHECK((*refused)["reason"] == "offboard lost");

    const auto [code, metrics] = http_get(gw.port(), "/session/metrics");
    CHECK(code == 200);
    CHECK(metrics.contains("lag_estimate"));
    CHECK(metrics["rms_velocity_error"].size() == 3);
    gw.stop();
}
