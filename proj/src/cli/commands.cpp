#include <vdt/aero/io.hpp>
#include <vdt/aero/synthetic.hpp>
#include <vdt/cli/commands.hpp>
#include <vdt/cli/manifest.hpp>
#include <vdt/common/csv.hpp>
#include <vdt/common/errors.hpp>
#include <vdt/common/log.hpp>
#include <vdt/common/math.hpp>
#include <vdt/d2p/session.hpp>
#include <vdt/fusion/emulators.hpp>
#include <vdt/fusion/fuse.hpp>
#include <vdt/gateway/gateway.hpp>
#include <vdt/propulsion/thrust_curve.hpp>
#include <vdt/sim/mission.hpp>
#include <vdt/sim/telemetry.hpp>
#include <vdt/vehicle/dynamics.hpp>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>

namespace vdt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using DbPtr = std::shared_ptr<const aero::AeroDatabase>;

/// "reference" names the built-in analytic database; anything else is a path.
DbPtr load_db(const std::string& spec) {
    if (spec == "reference") {
        return std::make_shared<const aero::AeroDatabase>(aero::make_reference_database());
    }
    return std::make_shared<const aero::AeroDatabase>(aero::load_database(spec));
}

json read_json_file(const fs::path& p) {
    std::ifstream in(p);
    if (!in) {
        throw LoadError("cannot open " + p.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw LoadError(p.string() + ": " + e.what());
    }
}

void write_json_file(const fs::path& p, const json& j) {
    std::ofstream out(p);
    if (!out) {
        throw Error("cannot write " + p.string());
    }
    out << j.dump(2) << '\n';
}

void prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ArgumentError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
}

fusion::FusionConfig fusion_config_from_json(const json& j) {
    fusion::FusionConfig c;
    c.nugget = j.value("nugget", c.nugget);
    c.max_nugget = j.value("max_nugget", c.max_nugget);
    c.theta_min = j.value("theta_min", c.theta_min);
    c.theta_max = j.value("theta_max", c.theta_max);
    c.multistart_count = j.value("multistart_count", c.multistart_count);
    c.optimizer_budget = j.value("optimizer_budget", c.optimizer_budget);
    c.mle_subsample = j.value("mle_subsample", c.mle_subsample);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    return c;
}

std::vector<double> grid_axis(double lo, double hi, double step) {
    if (!(step > 0.0)) {
        throw ArgumentError("grid step must be positive");
    }
    std::vector<double> v;
    const auto n = static_cast<int>(std::llround((hi - lo) / step));
    for (int i = 0; i <= n; ++i) {
        v.push_back(lo + step * i);
    }
    if (std::abs(v.back() - hi) > 1e-9) {
        throw ArgumentError("grid step must divide the analysis range");
    }
    v.back() = hi;
    return v;
}

sim::Simulator make_simulator(DbPtr db, sim::SimConfig cfg = {}) {
    return sim::Simulator(vehicle::VehicleParams{}, std::move(db), propulsion::RotorGeometry::symmetric_default(),
                          propulsion::ThrustCurve::wind_tunnel_default(), cfg);
}

vehicle::BodyState state_from_json(const json& j) {
    vehicle::BodyState s;
    s.u = j.at("u");
    s.v = j.at("v");
    s.w = j.at("w");
    s.p = j.at("p");
    s.q = j.at("q");
    s.r = j.at("r");
    s.phi = j.at("phi");
    s.theta = j.at("theta");
    s.psi = j.at("psi");
    s.pos_n = j.at("pos_n");
    s.pos_e = j.at("pos_e");
    s.pos_d = j.at("pos_d");
    return s;
}

/// Twin trace from a telemetry JSONL log.
d2p::TwinTrace read_trace(const fs::path& p) {
    std::ifstream in(p);
    if (!in) {
        throw LoadError("cannot open " + p.string());
    }
    d2p::TwinTrace trace;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) {
            continue;
        }
        try {
            const json j = json::parse(line);
            const vehicle::BodyState s = state_from_json(j.at("state"));
            trace.push_back({j.at("t").get<double>(), s.position_ned(), vehicle::body_to_ned(s)});
        } catch (const json::exception& e) {
            throw LoadError(p.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return trace;
}

double mean_pitch_after(const std::vector<sim::TelemetryRecord>& log, double t0) {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : log) {
        if (r.t >= t0) {
            sum += r.state.theta;
            ++n;
        }
    }
    if (n == 0) {
        throw ArgumentError("no telemetry after the settling time");
    }
    return sum / n;
}

struct ClampCounts {
    std::size_t aero_table_clamped = 0;
    std::size_t throttle_saturated = 0;
};

ClampCounts clamp_counts(const std::vector<sim::TelemetryRecord>& log) {
    ClampCounts c;
    for (const auto& r : log) {
        c.aero_table_clamped += r.aero_extrapolated ? 1 : 0;
        for (double t : r.command.throttles()) {
            if (t <= 0.0 || t >= 1.0) {
                ++c.throttle_saturated;
                break;
            }
        }
    }
    return c;
}

// Shared by every subcommand.
struct Common {
    std::uint64_t seed = 0;
    std::vector<std::string> args;
};

// ---------------------------------------------------------------------------
// fuse

struct FuseOptions {
    std::string hf;
    std::vector<std::string> lf;
    std::string out;
    std::string config;
    std::string increments;
    double grid_step = 2.5;
};

int cmd_fuse(const FuseOptions& o, const Common& common) {
    fusion::FusionConfig cfg = o.config.empty() ? fusion::FusionConfig{} : fusion_config_from_json(read_json_file(o.config));
    cfg.rng_seed = common.seed;
    cfg.validate();
    const fusion::Dataset hf = fusion::load_dataset(o.hf);
    std::vector<fusion::Dataset> lf;
    for (const auto& p : o.lf) {
        lf.push_back(fusion::load_dataset(p));
    }
    fusion::GridSpec grid;
    grid.alpha = grid_axis(-20.0, 30.0, o.grid_step);
    grid.beta = grid_axis(0.0, 20.0, o.grid_step);
    std::optional<aero::AeroDatabase> increments;
    if (!o.increments.empty()) {
        increments = aero::load_database(o.increments);
    }
    const fs::path out(o.out);
    prepare_dir(out);
    fusion::FusionResult result;
    try {
        result = fusion::fuse_aerodb(hf, lf, grid, cfg, increments ? &*increments : nullptr);
    } catch (const FitError& e) {
        write_json_file(out / "fusion_error.json", {{"error", e.what()}});
        throw;
    }
    aero::save_database(result.database, out / "db");
    write_json_file(out / "fusion_report.json", result.report.to_json());

    RunManifest m{"fuse", common.args, {}, common.seed, o.out, {}};
    m.config_paths.push_back(o.hf);
    m.config_paths.insert(m.config_paths.end(), o.lf.begin(), o.lf.end());
    if (!o.config.empty()) {
        m.config_paths.push_back(o.config);
    }
    m.collect_artifacts();
    m.write();

    std::cout << "coefficient  fused_cv_rmse  lf_rmse\n";
    for (const auto& c : result.report.coefficients) {
        std::cout << std::left << std::setw(13) << c.coefficient << std::setw(15) << c.fused_cv_rmse;
        for (std::size_t i = 0; i < c.lf_rmse.size(); ++i) {
            std::cout << (i ? " " : "") << c.sources[i] << '=' << c.lf_rmse[i];
        }
        std::cout << '\n';
    }
    std::cout << "database written to " << (out / "db").string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// emulate

struct EmulateOptions {
    std::vector<std::string> tools;
    std::size_t samples = 0;
    std::string out;
};

int cmd_emulate(const EmulateOptions& o, const Common& common) {
    const auto all = fusion::standard_emulators();
    std::vector<std::size_t> chosen;
    if (o.tools.empty()) {
        for (std::size_t i = 0; i < all.size(); ++i) {
            chosen.push_back(i);
        }
    } else {
        for (const auto& name : o.tools) {
            fusion::find_emulator(name);  // throws for unknown names
            for (std::size_t i = 0; i < all.size(); ++i) {
                if (all[i].name == name) {
                    chosen.push_back(i);
                }
            }
        }
    }
    const fs::path out(o.out);
    prepare_dir(out);
    for (std::size_t i : chosen) {
        const auto& tool = all[i];
        // Same per-tool seed as the full campaign, so --all reproduces it.
        const fusion::Dataset ds =
            fusion::emulate_dataset(tool, o.samples > 0 ? o.samples : tool.samples, fusion::tool_seed(common.seed, i));
        fusion::save_dataset(ds, out / (tool.name + ".csv"));
        std::cout << tool.name << " (" << tool.fidelity << "): " << ds.size() << " samples\n";
    }
    RunManifest m{"emulate", common.args, {}, common.seed, o.out, {}};
    m.collect_artifacts();
    m.write();
    return kExitOk;
}

// ---------------------------------------------------------------------------
// surrogate

struct SurrogateOptions {
    std::string data;
    std::string out;
    double grid_step = 2.5;
};

int cmd_surrogate(const SurrogateOptions& o, const Common& common) {
    fusion::FusionConfig cfg;
    cfg.rng_seed = common.seed;
    const fusion::Dataset ds = fusion::load_dataset(o.data);
    fusion::GridSpec grid;
    grid.alpha = grid_axis(-20.0, 30.0, o.grid_step);
    grid.beta = grid_axis(0.0, 20.0, o.grid_step);
    const fs::path out(o.out);
    prepare_dir(out);
    aero::save_database(fusion::surrogate_aerodb(ds, grid, cfg), out / "db");
    RunManifest m{"surrogate", common.args, {o.data}, common.seed, o.out, {}};
    m.collect_artifacts();
    m.write();
    std::cout << "database written to " << (out / "db").string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
    std::string mission;
    std::vector<double> square;  // side speed altitude
    std::string db = "reference";
    std::string out;
    int record_every = 5;
};

int cmd_simulate(const SimulateOptions& o, const Common& common) {
    if (o.mission.empty() == o.square.empty()) {
        throw ArgumentError("give exactly one of --mission or --square");
    }
    if (o.record_every < 1) {
        throw ArgumentError("--record-every must be at least 1");
    }
    const sim::MissionProfile mission = o.mission.empty()
                                            ? sim::MissionProfile::square_pattern(o.square[0], o.square[1], o.square[2])
                                            : sim::load_mission(o.mission);
    mission.validate();
    sim::SimConfig cfg;
    cfg.seed = common.seed;
    sim::Simulator simulator = make_simulator(load_db(o.db), cfg);
    const fs::path out(o.out);
    prepare_dir(out);
    const sim::MissionResult r = sim::run_mission(mission, simulator, o.record_every);
    sim::write_jsonl(out / "telemetry.jsonl", r.log);
    const ClampCounts clamps = clamp_counts(r.log);
    const json summary{{"mission", mission.name},
                       {"completed", r.completed},
                       {"error", r.error},
                       {"duration", r.log.empty() ? 0.0 : r.log.back().t},
                       {"records", r.log.size()},
                       {"final_position_error", r.final_position_error},
                       {"rejected_setpoints", r.rejected_setpoints},
                       {"clamp_counts",
                        {{"aero_table_clamped", clamps.aero_table_clamped},
                         {"throttle_saturated", clamps.throttle_saturated}}}};
    write_json_file(out / "summary.json", summary);
    std::optional<fs::path> dump;
    if (!r.completed) {
        dump = out / "state_dump.json";
        write_json_file(*dump, {{"error", r.error},
                                {"t", r.log.empty() ? 0.0 : r.log.back().t},
                                {"state", sim::state_to_json(r.final_state)}});
    }
    RunManifest m{"simulate", common.args, {}, common.seed, o.out, {}};
    if (!o.mission.empty()) {
        m.config_paths.push_back(o.mission);
    }
    if (o.db != "reference") {
        m.config_paths.push_back(o.db);
    }
    m.collect_artifacts();
    m.write();

    std::cout << "mission: " << mission.name << '\n'
              << "final position error: " << r.final_position_error << " m\n"
              << "aero table clamped records: " << clamps.aero_table_clamped << '\n'
              << "throttle saturated records: " << clamps.throttle_saturated << '\n'
              << "rejected setpoints: " << r.rejected_setpoints << '\n';
    if (dump) {
        std::cerr << "vdt: simulation halted: " << r.error << "\nstate dump: " << dump->string() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// fidelity

struct FidelityOptions {
    std::vector<std::string> dbs;     // exactly two
    std::vector<std::string> labels;  // optional, same count
    std::string mission;
    std::string out;
    double speed = 25.0;
    double altitude = 100.0;
    double front_throttle = 0.1;
    double duration = 120.0;
    double settle = 80.0;
};

int cmd_fidelity(const FidelityOptions& o, const Common& common) {
    if (o.dbs.size() != 2) {
        throw ArgumentError("--db must be given exactly twice");
    }
    std::vector<std::string> labels = o.labels;
    if (labels.empty()) {
        labels = {"a", "b"};
    } else if (labels.size() != 2 || labels[0] == labels[1]) {
        throw ArgumentError("--label must be given twice with distinct names");
    }
    const sim::MissionProfile mission =
        o.mission.empty() ? sim::MissionProfile::cruise_hold(o.speed, o.altitude, o.front_throttle, o.duration)
                          : sim::load_mission(o.mission);
    mission.validate();
    const fs::path out(o.out);
    prepare_dir(out);
    json report{{"mission", mission.name}, {"settle_time", o.settle}, {"runs", json::array()}};
    std::vector<double> pitch;
    for (std::size_t i = 0; i < 2; ++i) {
        sim::SimConfig cfg;
        cfg.seed = common.seed;
        sim::Simulator simulator = make_simulator(load_db(o.dbs[i]), cfg);
        const sim::MissionResult r = sim::run_mission(mission, simulator, 25);
        const fs::path trace = out / ("trace_" + labels[i] + ".jsonl");
        sim::write_jsonl(trace, r.log);
        if (!r.completed) {
            throw Error("mission under '" + labels[i] + "' halted: " + r.error);
        }
        pitch.push_back(mean_pitch_after(r.log, o.settle));
        report["runs"].push_back({{"label", labels[i]},
                                  {"database", o.dbs[i]},
                                  {"trace", trace.filename().string()},
                                  {"mean_pitch_deg", rad2deg(pitch.back())},
                                  {"final_mode", std::string(vehicle::to_string(r.log.back().mode))}});
    }
    report["opposite_sign"] = pitch[0] * pitch[1] < 0.0;
    report["pitch_difference_deg"] = rad2deg(pitch[0] - pitch[1]);
    write_json_file(out / "fidelity.json", report);
    RunManifest m{"fidelity", common.args, o.dbs, common.seed, o.out, {}};
    m.collect_artifacts();
    m.write();
    for (std::size_t i = 0; i < 2; ++i) {
        std::cout << labels[i] << ": mean pitch after " << o.settle << " s = " << rad2deg(pitch[i]) << " deg\n";
    }
    std::cout << "opposite sign: " << (report["opposite_sign"].get<bool>() ? "yes" : "no") << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// thrust

int cmd_thrust(double inflow, const std::string& curve) {
    const propulsion::ThrustCurve c =
        curve.empty() ? propulsion::ThrustCurve::wind_tunnel_default() : propulsion::load_thrust_curve(curve);
    if (!(inflow >= 0.0)) {
        throw ArgumentError("inflow must be non-negative, got " + std::to_string(inflow));
    }
    std::cout << csv::format_double(c.max_thrust(inflow)) << '\n';
    if (propulsion::ThrustCurve::extrapolation_flagged(inflow)) {
        std::cerr << "vdt: warning: inflow beyond " << propulsion::ThrustCurve::kTrustedLimit
                  << " m/s, extrapolated value\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// teleop

struct TeleopOptions {
    std::string digital_endpoint;
    std::string physical_endpoint;
    std::string gateway;
    std::string bridge_config;
    std::string script;
    std::string db = "reference";
    std::string out;
    double duration = 60.0;
    double delay = 0.0;
    double jitter = 0.0;
    double loss = 0.0;
    double reorder = 0.0;
    double kill_at = -1.0;  // negative: no kill
    double square_speed = 4.0;
    double leg = 12.0;
    double realtime = 0.0;
    bool threaded = false;
};

int cmd_teleop(const TeleopOptions& o, const Common& common) {
    if (o.digital_endpoint.empty() != o.physical_endpoint.empty()) {
        throw ArgumentError("UDP mode needs both --digital-endpoint and --physical-endpoint");
    }
    d2p::SessionConfig cfg;
    if (!o.bridge_config.empty()) {
        cfg.bridge = d2p::bridge_config_from_json(read_json_file(o.bridge_config));
    }
    cfg.duration = o.duration;
    cfg.downlink.delay = o.delay;
    cfg.downlink.jitter = o.jitter;
    cfg.downlink.loss_probability = o.loss;
    cfg.downlink.reorder_probability = o.reorder;
    cfg.downlink.seed = common.seed;
    cfg.uplink.seed = common.seed + 1;
    if (o.kill_at >= 0.0) {
        cfg.kill_stream_at = o.kill_at;
    }
    cfg.sim.seed = common.seed;
    cfg.script = o.script.empty() ? d2p::OperatorScript::square(o.square_speed, o.leg)
                                  : d2p::operator_script_from_json(read_json_file(o.script));
    const bool udp = !o.digital_endpoint.empty();
    // Live clients need wall-clock pacing.
    cfg.realtime_factor = o.realtime > 0.0 ? o.realtime : (o.gateway.empty() && !udp && !o.threaded ? 0.0 : 1.0);
    cfg.validate();

    const DbPtr db = load_db(o.db);
    std::unique_ptr<d2p::UdpChannel> digital_end;
    std::unique_ptr<d2p::UdpChannel> physical_end;
    std::unique_ptr<d2p::TeleopSession> session;
    if (udp) {
        cfg.bridge.digital = d2p::Endpoint::parse(o.digital_endpoint);
        cfg.bridge.physical = d2p::Endpoint::parse(o.physical_endpoint);
        digital_end = std::make_unique<d2p::UdpChannel>(cfg.bridge.digital, cfg.bridge.physical);
        physical_end = std::make_unique<d2p::UdpChannel>(cfg.bridge.physical, cfg.bridge.digital);
        session = std::make_unique<d2p::TeleopSession>(cfg, db, *digital_end, *physical_end);
    } else {
        session = std::make_unique<d2p::TeleopSession>(cfg, db);
    }
    std::unique_ptr<gateway::Gateway> gw;
    if (!o.gateway.empty()) {
        gateway::GatewayOptions go;
        go.bind = d2p::Endpoint::parse(o.gateway);
        gw = std::make_unique<gateway::Gateway>(go);
        gw->attach(*session);
        gw->start();
        std::cout << "gateway: ws://" << go.bind.host << ':' << gw->port() << "/session\n";
    }
    const d2p::SessionResult r = (udp || o.threaded) ? session->run_threaded() : session->run();
    if (gw) {
        gw->stop();
    }

    const fs::path out(o.out);
    prepare_dir(out);
    d2p::write_session_outputs(r, out);
    RunManifest m{"teleop", common.args, {}, common.seed, o.out, {}};
    for (const auto& p : {o.bridge_config, o.script}) {
        if (!p.empty()) {
            m.config_paths.push_back(p);
        }
    }
    m.collect_artifacts();
    m.write();

    std::cout << "setpoints sent: " << r.sends << " (unclamped " << r.unclamped_sends << ", missed ticks "
              << r.missed_ticks << ")\n"
              << "frames received by physical twin: " << r.frames_received << " (lost " << r.lost_frames
              << ", out of order " << r.out_of_order << ", duplicates " << r.duplicates << ")\n";
    if (r.metrics) {
        const auto& mt = *r.metrics;
        std::cout << "lag estimate: " << mt.lag_estimate << " s\n"
                  << "rms velocity error: " << mt.rms_velocity_error.x() << ' ' << mt.rms_velocity_error.y() << ' '
                  << mt.rms_velocity_error.z() << " m/s\n";
    } else {
        std::cout << "metrics unavailable: " << r.metrics_error << '\n';
    }
    if (r.watchdog_trip_time) {
        std::cout << "watchdog tripped " << *r.watchdog_trip_time << " s after stream kill\n";
    }
    if (!r.error.empty()) {
        std::cerr << "vdt: session halted: " << r.error << '\n';
        return kExitRuntime;
    }
    if (r.sends == 0 || r.frames_received == 0) {
        std::cerr << "vdt: stream starvation: the physical twin received no setpoints\n";
        return kExitRuntime;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// metrics

int cmd_metrics(const std::string& digital, const std::string& physical, const std::string& out) {
    const d2p::TwinSyncMetrics m = d2p::compute_sync_metrics(read_trace(digital), read_trace(physical));
    const std::string text = d2p::to_json(m).dump(2);
    if (out.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream f(out);
        if (!f) {
            throw ArgumentError("cannot write " + out);
        }
        f << text << '\n';
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args) {
    configure_logging_from_env();
    CLI::App app{"Digital-twin teleoperation toolkit for a tilt-rotor eVTOL", "vdt"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    common.args = args;
    app.add_option("--seed", common.seed, "Seed for every random draw")->capture_default_str();
    std::function<int()> action;

    FuseOptions fuse;
    auto* f = app.add_subcommand("fuse", "Fuse HF and LF datasets into an aerodynamic database");
    f->add_option("--hf", fuse.hf, "High-fidelity dataset CSV")->required();
    f->add_option("--lf", fuse.lf, "Low-fidelity dataset CSVs")->required()->expected(1, -1);
    f->add_option("--out", fuse.out, "Output directory")->required();
    f->add_option("--config", fuse.config, "Fusion config JSON");
    f->add_option("--increments", fuse.increments, "Database whose increment tables are reused");
    f->add_option("--grid-step", fuse.grid_step, "Output grid spacing in degrees")->capture_default_str();
    f->callback([&] { action = [&] { return cmd_fuse(fuse, common); }; });

    EmulateOptions emulate;
    auto* e = app.add_subcommand("emulate", "Generate synthetic analysis-tool datasets");
    e->add_option("--tool", emulate.tools, "Tool name (default: all)");
    e->add_option("--samples", emulate.samples, "Samples per tool (default: campaign size)");
    e->add_option("--out", emulate.out, "Output directory")->required();
    e->callback([&] { action = [&] { return cmd_emulate(emulate, common); }; });

    SurrogateOptions surrogate;
    auto* s = app.add_subcommand("surrogate", "Tabulate a single-source kriging database");
    s->add_option("--data", surrogate.data, "Dataset CSV")->required();
    s->add_option("--out", surrogate.out, "Output directory")->required();
    s->add_option("--grid-step", surrogate.grid_step, "Output grid spacing in degrees")->capture_default_str();
    s->callback([&] { action = [&] { return cmd_surrogate(surrogate, common); }; });

    SimulateOptions simulate;
    auto* m = app.add_subcommand("simulate", "Fly a mission against a database");
    m->add_option("--mission", simulate.mission, "Mission JSON");
    m->add_option("--square", simulate.square, "Square pattern: side speed altitude")->expected(3);
    m->add_option("--db", simulate.db, "Database directory or 'reference'")->capture_default_str();
    m->add_option("--out", simulate.out, "Output directory")->required();
    m->add_option("--record-every", simulate.record_every, "Log every n-th tick")->capture_default_str();
    m->callback([&] { action = [&] { return cmd_simulate(simulate, common); }; });

    FidelityOptions fidelity;
    auto* fi = app.add_subcommand("fidelity", "Fly the same mission under two databases and compare");
    fi->add_option("--db", fidelity.dbs, "Database (give twice)")->required();
    fi->add_option("--label", fidelity.labels, "Run labels (give twice)");
    fi->add_option("--mission", fidelity.mission, "Mission JSON (default: cruise hold)");
    fi->add_option("--out", fidelity.out, "Output directory")->required();
    fi->add_option("--speed", fidelity.speed, "Cruise speed m/s")->capture_default_str();
    fi->add_option("--altitude", fidelity.altitude, "Cruise altitude m")->capture_default_str();
    fi->add_option("--front-throttle", fidelity.front_throttle, "Front rotor throttle")->capture_default_str();
    fi->add_option("--duration", fidelity.duration, "Mission duration s")->capture_default_str();
    fi->add_option("--settle", fidelity.settle, "Pitch is averaged after this time s")->capture_default_str();
    fi->callback([&] { action = [&] { return cmd_fidelity(fidelity, common); }; });

    double inflow = 0.0;
    std::string curve;
    auto* t = app.add_subcommand("thrust", "Maximum rotor thrust at an axial inflow speed");
    t->add_option("--inflow", inflow, "Inflow speed m/s")->required();
    t->add_option("--curve", curve, "Thrust curve CSV (default: wind-tunnel data)");
    t->callback([&] { action = [&] { return cmd_thrust(inflow, curve); }; });

    TeleopOptions teleop;
    auto* tp = app.add_subcommand("teleop", "Run a digital/physical twin teleoperation session");
    tp->add_option("--digital-endpoint", teleop.digital_endpoint, "host:port of the digital side (UDP mode)");
    tp->add_option("--physical-endpoint", teleop.physical_endpoint, "host:port of the physical side (UDP mode)");
    tp->add_option("--gateway", teleop.gateway, "Serve the live gateway on host:port");
    tp->add_option("--bridge-config", teleop.bridge_config, "Bridge config JSON");
    tp->add_option("--script", teleop.script, "Operator script JSON (default: square)");
    tp->add_option("--db", teleop.db, "Database directory or 'reference'")->capture_default_str();
    tp->add_option("--out", teleop.out, "Output directory")->required();
    tp->add_option("--duration", teleop.duration, "Session length s")->capture_default_str();
    tp->add_option("--delay", teleop.delay, "Injected one-way delay s")->capture_default_str();
    tp->add_option("--jitter", teleop.jitter, "Injected uniform jitter s")->capture_default_str();
    tp->add_option("--loss", teleop.loss, "Injected loss probability")->capture_default_str();
    tp->add_option("--reorder", teleop.reorder, "Injected reorder probability")->capture_default_str();
    tp->add_option("--kill-at", teleop.kill_at, "Kill the setpoint stream at this time s");
    tp->add_option("--square-speed", teleop.square_speed, "Requested speed of the square script m/s")
        ->capture_default_str();
    tp->add_option("--leg", teleop.leg, "Leg duration of the square script s")->capture_default_str();
    tp->add_option("--realtime", teleop.realtime, "Pace at this multiple of wall-clock time (0: as fast as possible)");
    tp->add_flag("--threaded", teleop.threaded, "Run twins and bridge on separate threads");
    tp->callback([&] { action = [&] { return cmd_teleop(teleop, common); }; });

    std::string mdigital;
    std::string mphysical;
    std::string mout;
    auto* mt = app.add_subcommand("metrics", "Twin synchronisation metrics from two telemetry logs");
    mt->add_option("--digital", mdigital, "Digital twin telemetry JSONL")->required();
    mt->add_option("--physical", mphysical, "Physical twin telemetry JSONL")->required();
    mt->add_option("--out", mout, "Write JSON here instead of stdout");
    mt->callback([&] { action = [&] { return cmd_metrics(mdigital, mphysical, mout); }; });

    // CLI11 expects argv order reversed when given a vector.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForAllHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return kExitUsage;
    }
    try {
        return action();
    } catch (const ArgumentError& ex) {
        std::cerr << "vdt: error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const LoadError& ex) {
        std::cerr << "vdt: error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& ex) {
        std::cerr << "vdt: error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& ex) {
        std::cerr << "vdt: error: " << ex.what() << '\n';
        return kExitRuntime;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args);
}

} // namespace vdt::cli
