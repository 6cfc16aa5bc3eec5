#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vdt/aero/synthetic.hpp>
#include <vdt/common/errors.hpp>
#include <vdt/fusion/emulators.hpp>
#include <vdt/fusion/fuse.hpp>
#include <vdt/sim/mission.hpp>
#include <vdt/sim/telemetry.hpp>
#include <vdt/vehicle/dynamics.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace vdt;
using namespace vdt::sim;

namespace {

std::shared_ptr<const aero::AeroDatabase> reference_db() {
    static const auto db = std::make_shared<const aero::AeroDatabase>(aero::make_reference_database());
    return db;
}

Simulator make_sim(std::shared_ptr<const aero::AeroDatabase> db = reference_db(), SimConfig cfg = {}) {
    return Simulator(vehicle::VehicleParams{}, std::move(db), propulsion::RotorGeometry::symmetric_default(),
                     propulsion::ThrustCurve::wind_tunnel_default(), cfg);
}

CascadeController make_controller() {
    return CascadeController(vehicle::VehicleParams{}, propulsion::RotorGeometry::symmetric_default(),
                             propulsion::ThrustCurve::wind_tunnel_default());
}

double mechanical_energy(const vehicle::BodyState& s, const vehicle::VehicleParams& p) {
    const Vec3 w = s.rates();
    return 0.5 * p.mass * s.velocity_body().squaredNorm() + 0.5 * w.dot(p.inertia_tensor() * w) -
           p.mass * p.gravity * s.pos_d;
}

double mean_pitch_after(const MissionResult& r, double t0) {
    double sum = 0.0;
    int n = 0;
    for (const auto& rec : r.log) {
        if (rec.t >= t0) {
            sum += rec.state.theta;
            ++n;
        }
    }
    return sum / n;
}

} // namespace

TEST_CASE("setpoint mask uses ignore-bit semantics") {
    const Setpoint p = Setpoint::position_target(Vec3(1, 2, 3), 0.5);
    CHECK(p.uses_position(0));
    CHECK(p.uses_position(2));
    CHECK_FALSE(p.uses_velocity(0));
    CHECK(p.uses_yaw());
    CHECK_FALSE(p.uses_yaw_rate());
    CHECK(p.well_formed());

    const Setpoint v = Setpoint::velocity_only(Vec3(1, 0, 0));
    CHECK_FALSE(v.uses_position(1));
    CHECK(v.uses_velocity(1));
    CHECK_FALSE(v.uses_yaw());

    Setpoint none;
    CHECK_FALSE(none.well_formed());
    Setpoint force = p;
    force.type_mask |= mask::kForceSetpoint;
    CHECK_FALSE(force.well_formed());

    Setpoint masked_nan = v;
    masked_nan.position.x() = std::nan("");
    CHECK(masked_nan.finite());
    masked_nan.velocity.y() = INFINITY;
    CHECK_FALSE(masked_nan.finite());
}

TEST_CASE("controller at the setpoint commands hover throttle on every rotor") {
    CascadeController c = make_controller();
    vehicle::BodyState s;
    s.pos_d = -10.0;
    const auto out = c.update(s, Setpoint::position_target(s.position_ned(), 0.0), 0.004);
    const double expected = 11.828 * 9.80665 / (4.0 * 67.3);
    CHECK(expected == doctest::Approx(0.431).epsilon(1e-3));
    for (double u : out.command.throttles()) {
        CHECK(u == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(c.hover_throttle() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(out.command.tilt_deg() == 90.0);
}

TEST_CASE("forward velocity demand pitches the nose down with rear rotors working harder") {
    CascadeController c = make_controller();
    vehicle::BodyState s;
    const auto out = c.update(s, Setpoint::velocity_target(Vec3(1, 0, 0), 0.0), 0.004);
    const double pitch_target = -std::asin(out.attitude_target(2, 0));
    CHECK(pitch_target < 0.0);
    const auto& u = out.command.throttles();
    // Rotors 0 and 2 are forward (x > 0), 1 and 3 aft.
    CHECK(u[1] > u[0]);
    CHECK(u[3] > u[2]);
}

TEST_CASE("yaw demand drives the rotor pair whose reaction torque helps") {
    CascadeController c = make_controller();
    vehicle::BodyState s;
    const auto out = c.update(s, Setpoint::position_target(Vec3::Zero(), kPi / 2.0), 0.004);
    const auto& u = out.command.throttles();
    // Positive yaw moment comes from the spin = -1 rotors (2 and 3).
    CHECK(u[2] > u[0]);
    CHECK(u[3] > u[1]);
}

TEST_CASE("non-finite setpoints are rejected and the previous command held") {
    CascadeController c = make_controller();
    vehicle::BodyState s;
    const auto first = c.update(s, Setpoint::velocity_target(Vec3(1, 0, 0), 0.0), 0.004);
    Setpoint bad = Setpoint::velocity_target(Vec3(std::nan(""), 0, 0), 0.0);
    const auto second = c.update(s, bad, 0.004);
    CHECK(second.rejected);
    CHECK(second.command == first.command);

    Simulator sim = make_sim();
    sim.reset(s);
    CHECK(sim.set_setpoint(Setpoint::position_target(Vec3(0, 0, -5), 0.0)));
    CHECK_FALSE(sim.set_setpoint(bad));
    CHECK(sim.active_setpoint()->position.z() == -5.0);
    CHECK(sim.rejected_setpoints() == 1);
}

TEST_CASE("controller outputs stay in range and attitude targets inside the tilt cone") {
    CascadeController c = make_controller();
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double cone = std::cos(deg2rad(35.0)) - 1e-12;
    for (int i = 0; i < 2000; ++i) {
        vehicle::BodyState s;
        s.u = 5 * u(rng);
        s.v = 5 * u(rng);
        s.w = 3 * u(rng);
        s.p = u(rng);
        s.q = u(rng);
        s.r = u(rng);
        s.phi = 0.6 * u(rng);
        s.theta = 0.6 * u(rng);
        s.psi = 3.0 * u(rng);
        s.pos_n = 50 * u(rng);
        s.pos_e = 50 * u(rng);
        s.pos_d = -10 + 20 * u(rng);
        const Setpoint sp = (i % 2 == 0) ? Setpoint::position_target(Vec3(50 * u(rng), 50 * u(rng), -10), u(rng))
                                         : Setpoint::velocity_target(Vec3(8 * u(rng), 8 * u(rng), 4 * u(rng)), u(rng));
        const auto out = c.update(s, sp, 0.004);
        for (double t : out.command.throttles()) {
            CHECK(t >= 0.0);
            CHECK(t <= 1.0);
        }
        // Body z of the target against NED down.
        CHECK(out.attitude_target(2, 2) >= cone);
        CHECK(std::hypot(out.velocity_target.x(), out.velocity_target.y()) <= 5.0 + 1e-12);
    }
}

TEST_CASE("velocity integrator is frozen while throttles saturate") {
    CascadeController c = make_controller();
    vehicle::BodyState s;
    s.p = 6.0;  // violent roll rate: the rate loop saturates the mixer
    int saturated_ticks = 0;
    for (int i = 0; i < 20; ++i) {
        const Vec3 before = c.integrator();
        const auto out = c.update(s, Setpoint::velocity_target(Vec3(4, 0, 0), 0.0), 0.004);
        if (out.saturated) {
            ++saturated_ticks;
            CHECK(c.integrator() == before);
        }
    }
    CHECK(saturated_ticks > 0);
    // Without saturation the integrator moves.
    CascadeController calm = make_controller();
    calm.update(vehicle::BodyState{}, Setpoint::velocity_target(Vec3(0.05, 0, 0), 0.0), 0.004);
    CHECK(calm.integrator().x() > 0.0);
}

TEST_CASE("hover trim held for 5 s drifts less than 0.1 m") {
    Simulator sim = make_sim();
    MissionProfile m;
    m.name = "hover";
    m.initial.pos_d = -10.0;
    MissionSegment hold;
    hold.target = Vec3(0, 0, -10);
    hold.duration = 5.0;
    m.segments.push_back(hold);
    const MissionResult r = run_mission(m, sim, 10);
    REQUIRE(r.completed);
    for (const auto& rec : r.log) {
        CHECK((rec.state.position_ned() - Vec3(0, 0, -10)).norm() < 0.1);
    }
}

TEST_CASE("with no thrust and no aero the vehicle free-falls") {
    Simulator sim = make_sim(nullptr);
    sim.reset(vehicle::BodyState{});
    sim.set_scripted(propulsion::PropulsionCommand());
    for (int i = 0; i < 250; ++i) {
        sim.step();
    }
    CHECK(sim.state().pos_d > 4.0);
    CHECK(sim.state().pos_d == doctest::Approx(0.5 * 9.80665).epsilon(0.02));
}

TEST_CASE("RK4 at dt and dt/2 agree to 1e-4 m over 10 s") {
    auto run = [](double dt) {
        SimConfig cfg;
        cfg.dt = dt;
        Simulator sim = make_sim(reference_db(), cfg);
        vehicle::BodyState s;
        s.u = 8.0;
        s.pos_d = -50.0;
        sim.reset(s);
        sim.set_scripted(propulsion::PropulsionCommand({0.45, 0.42, 0.45, 0.43}, 60.0), {{"elevator", -2.0}});
        const int steps = static_cast<int>(std::lround(10.0 / dt));
        for (int i = 0; i < steps; ++i) {
            sim.step();
        }
        return sim.state().position_ned();
    };
    const Vec3 coarse = run(0.004);
    const Vec3 fine = run(0.002);
    MESSAGE("step-halving position difference " << (coarse - fine).norm() << " m");
    CHECK((coarse - fine).norm() < 1e-4);
}

TEST_CASE("energy is conserved with no aero and no thrust") {
    Simulator sim = make_sim(nullptr);
    vehicle::BodyState s;
    s.u = 3.0;
    s.v = -1.0;
    s.w = 0.5;
    s.p = 0.4;
    s.q = -0.3;
    s.r = 0.2;
    s.theta = 0.1;
    sim.reset(s);
    sim.set_scripted(propulsion::PropulsionCommand());
    const vehicle::VehicleParams p;
    const double e0 = mechanical_energy(sim.state(), p);
    for (int i = 0; i < 2500; ++i) {
        sim.step();
    }
    const double e1 = mechanical_energy(sim.state(), p);
    CHECK(std::abs(e1 - e0) / std::abs(e0) < 1e-5);
}

TEST_CASE("square pattern generator structure") {
    const MissionProfile m = MissionProfile::square_pattern(20, 2, 10);
    int legs = 0;
    int yaw_holds = 0;
    for (const auto& s : m.segments) {
        if (s.kind == MissionSegment::Kind::Velocity) {
            ++legs;
            CHECK(s.target.norm() == doctest::Approx(2.0));
            CHECK(s.duration == doctest::Approx(10.0));
        } else if (s.label.find("yaw") != std::string::npos) {
            ++yaw_holds;
        }
    }
    CHECK(legs == 4);
    CHECK(yaw_holds == 4);
    CHECK(m.initial.pos_d == -10.0);
    CHECK_THROWS_AS(MissionProfile::square_pattern(-1, 2, 10), ArgumentError);
}

TEST_CASE("square pattern closes within 1 m") {
    Simulator sim = make_sim();
    const MissionProfile m = MissionProfile::square_pattern(20, 2, 10);
    const MissionResult r = run_mission(m, sim, 25);
    REQUIRE(r.completed);
    CHECK(r.final_position_error < 1.0);
    CHECK((r.final_state.position_ned() - m.initial.position_ned()).norm() < 1.0);
    // The far corner is actually reached.
    double max_north = 0.0;
    for (const auto& rec : r.log) {
        max_north = std::max(max_north, rec.state.pos_n);
        for (double t : rec.command.throttles()) {
            CHECK(t >= 0.0);
            CHECK(t <= 1.0);
        }
    }
    CHECK(max_north > 18.0);
}

TEST_CASE("identical missions under two databases give aligned traces and opposite cruise pitch") {
    const fusion::ToolEmulator avl = fusion::find_emulator("avl");
    const auto biased = std::make_shared<const aero::AeroDatabase>(fusion::tabulate_database(
        [&](aero::Coefficient c, double a, double b) { return avl.model(a, b)[c]; }, fusion::GridSpec::standard(),
        nullptr));
    const MissionProfile m = MissionProfile::cruise_hold(25.0, 100.0, 0.1, 120.0);
    Simulator good = make_sim(reference_db());
    Simulator bad = make_sim(biased);
    const MissionResult a = run_mission(m, good, 25);
    const MissionResult b = run_mission(m, bad, 25);
    REQUIRE(a.completed);
    REQUIRE(b.completed);
    REQUIRE(a.log.size() == b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        CHECK(a.log[i].t == b.log[i].t);
    }
    const double pitch_ref = mean_pitch_after(a, 80.0);
    const double pitch_biased = mean_pitch_after(b, 80.0);
    MESSAGE("mean cruise pitch: reference " << rad2deg(pitch_ref) << " deg, biased " << rad2deg(pitch_biased) << " deg");
    CHECK(pitch_ref > 0.0);
    CHECK(pitch_biased < 0.0);
    CHECK(a.log.back().mode == vehicle::FlightMode::Cruise);
}

TEST_CASE("gimbal lock halts the run and keeps the partial log") {
    Simulator sim = make_sim();
    MissionProfile m;
    m.name = "nose up";
    m.initial.theta = kPi / 2.0 - 2e-4;
    m.initial.q = 2.0;
    m.initial.pos_d = -50.0;
    MissionSegment s;
    s.kind = MissionSegment::Kind::Scripted;
    s.duration = 1.0;
    m.segments.push_back(s);
    const MissionResult r = run_mission(m, sim, 1);
    CHECK_FALSE(r.completed);
    CHECK(r.error.find("pitch") != std::string::npos);
    CHECK(r.log.size() >= 1);
}

TEST_CASE("telemetry is deterministic and carries the required fields") {
    auto run = [] {
        Simulator sim = make_sim();
        std::ostringstream out;
        run_mission(MissionProfile::square_pattern(6, 2, 5), sim, 50,
                    [&](const TelemetryRecord& r) { write_jsonl(out, r); });
        return out.str();
    };
    const std::string a = run();
    CHECK(a == run());
    std::istringstream in(a);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"t", "state", "mode", "setpoint", "command", "aero", "propulsion"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["aero"]["moment"].size() == 3);
    CHECK(j["state"].contains("theta"));
    CHECK(setpoint_from_json(j["setpoint"]).well_formed());
}

TEST_CASE("mission files round trip and bad files name themselves") {
    const auto dir = std::filesystem::temp_directory_path() / "vdt_test_sim";
    std::filesystem::create_directories(dir);
    const MissionProfile m = MissionProfile::square_pattern(10, 2, 5);
    {
        std::ofstream(dir / "square.json") << mission_to_json(m).dump(2);
    }
    const MissionProfile back = load_mission(dir / "square.json");
    CHECK(back.segments.size() == m.segments.size());
    CHECK(back.segments[2].target == m.segments[2].target);
    CHECK(back.initial.pos_d == m.initial.pos_d);
    {
        std::ofstream(dir / "broken.json") << R"({"segments": [{"kind": "waypoint", "duration": -1, "target": [0,0,0]}]})";
    }
    try {
        load_mission(dir / "broken.json");
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        CHECK(std::string(e.what()).find("broken.json") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("sim config validation") {
    SimConfig cfg;
    cfg.dt = 0.05;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    ControllerGains g;
    g.vel_p.x() = -1.0;
    CHECK_THROWS_AS(g.validate(), ArgumentError);
}
