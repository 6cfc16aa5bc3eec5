#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vdt/aero/buildup.hpp>
#include <vdt/aero/io.hpp>
#include <vdt/aero/synthetic.hpp>
#include <vdt/common/errors.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace vdt;
using namespace vdt::aero;
namespace fs = std::filesystem;

namespace {

double lerp1(const std::vector<double>& g, const std::vector<double>& v, double x) {
    std::size_t i = 0;
    while (i + 2 < g.size() && x > g[i + 1]) {
        ++i;
    }
    const double t = (x - g[i]) / (g[i + 1] - g[i]);
    return v[i] + t * (v[i + 1] - v[i]);
}

// Nested 1-D interpolation: interpolate along the last axis for every slice,
// then along the first.
double nested_lerp2(const AeroTable& t, double x, double y) {
    const auto& gx = t.axis_grids[0];
    const auto& gy = t.axis_grids[1];
    std::vector<double> column(gx.size());
    for (std::size_t i = 0; i < gx.size(); ++i) {
        std::vector<double> row(t.values.begin() + i * gy.size(), t.values.begin() + (i + 1) * gy.size());
        column[i] = lerp1(gy, row, y);
    }
    return lerp1(gx, column, x);
}

AeroTable random_table(std::mt19937_64& rng, std::size_t nx, std::size_t ny) {
    std::uniform_real_distribution<double> step(0.2, 3.0), val(-2.0, 2.0);
    AeroTable t{{"alpha", "beta"}, {{}, {}}, {}};
    double x = -5.0, y = -2.0;
    for (std::size_t i = 0; i < nx; ++i) {
        t.axis_grids[0].push_back(x);
        x += step(rng);
    }
    for (std::size_t i = 0; i < ny; ++i) {
        t.axis_grids[1].push_back(y);
        y += step(rng);
    }
    for (std::size_t i = 0; i < nx * ny; ++i) {
        t.values.push_back(val(rng));
    }
    return t;
}

AeroDatabase constant_db() {
    AeroDatabase db;
    for (Coefficient c : kAllCoefficients) {
        db[c].baseline = AeroTable::constant({"alpha", "beta"}, {{-20, 30}, {-20, 20}}, 0.0);
    }
    return db;
}

fs::path temp_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("vdt_aero_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("interpolation is exact on grid nodes") {
    std::mt19937_64 rng(11);
    const AeroTable t = random_table(rng, 6, 5);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            const std::array<double, 2> c{t.axis_grids[0][i], t.axis_grids[1][j]};
            const auto l = interpolate(t, c);
            CHECK(l.value == t.values[i * 5 + j]);
            CHECK_FALSE(l.extrapolated);
        }
    }
}

TEST_CASE("one-axis linear midpoint") {
    AeroTable t{{"alpha"}, {{0.0, 10.0}}, {1.0, 3.0}};
    CHECK(interpolate(t, std::map<std::string, double>{{"alpha", 5.0}}).value == 2.0);
}

TEST_CASE("two-axis interpolation agrees with nested 1-D oracle") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const AeroTable t = random_table(rng, 7, 4);
        std::uniform_real_distribution<double> ux(t.axis_grids[0].front(), t.axis_grids[0].back());
        std::uniform_real_distribution<double> uy(t.axis_grids[1].front(), t.axis_grids[1].back());
        for (int i = 0; i < 100; ++i) {
            const double x = ux(rng), y = uy(rng);
            const std::array<double, 2> c{x, y};
            CHECK(std::abs(interpolate(t, c).value - nested_lerp2(t, x, y)) < 1e-12);
        }
    }
}

TEST_CASE("interpolation is continuous across cell boundaries") {
    std::mt19937_64 rng(9);
    const AeroTable t = random_table(rng, 5, 5);
    for (std::size_t i = 1; i + 1 < 5; ++i) {
        const double xb = t.axis_grids[0][i];
        for (double y : {t.axis_grids[1][0] + 0.1, t.axis_grids[1][2] + 0.05}) {
            const std::array<double, 2> lo{std::nextafter(xb, -1e9), y}, hi{std::nextafter(xb, 1e9), y};
            CHECK(std::abs(interpolate(t, lo).value - interpolate(t, hi).value) < 1e-9);
        }
    }
}

TEST_CASE("outside the grid the edge gradient is continued and flagged") {
    AeroTable t{{"alpha"}, {{0.0, 10.0, 20.0}}, {1.0, 3.0, 4.0}};
    const std::array<double, 1> above{30.0}, below{-5.0};
    const auto hi = interpolate(t, above);
    CHECK(hi.extrapolated);
    CHECK(hi.value == doctest::Approx(5.0));
    const auto lo = interpolate(t, below);
    CHECK(lo.extrapolated);
    CHECK(lo.value == doctest::Approx(0.0));
}

TEST_CASE("extrapolation stays on the edge-extended linear model") {
    std::mt19937_64 rng(21);
    const AeroTable t = random_table(rng, 4, 4);
    const auto& gx = t.axis_grids[0];
    const auto& gy = t.axis_grids[1];
    for (double x : {gx.back() + 1.0, gx.back() + 10.0}) {
        // Beyond the last alpha node the value is linear in x along the
        // edge cell; compare against the two-point line through the edge.
        const double y = gy[1];
        const std::array<double, 2> a{gx[gx.size() - 2], y}, b{gx.back(), y}, c{x, y};
        const double va = interpolate(t, a).value, vb = interpolate(t, b).value;
        const double line = vb + (vb - va) / (gx.back() - gx[gx.size() - 2]) * (x - gx.back());
        CHECK(interpolate(t, c).value == doctest::Approx(line).epsilon(1e-12));
    }
}

TEST_CASE("missing axis is an argument error") {
    AeroTable t{{"alpha", "beta"}, {{0.0, 1.0}, {0.0, 1.0}}, {0, 1, 2, 3}};
    CHECK_THROWS_AS(interpolate(t, std::map<std::string, double>{{"alpha", 0.5}}), ArgumentError);
}

TEST_CASE("table validation names the axis") {
    AeroTable t{{"alpha", "beta"}, {{0.0, 1.0}, {0.0, 0.0}}, {0, 1, 2, 3}};
    try {
        t.validate();
        FAIL("expected failure");
    } catch (const ArgumentError& e) {
        CHECK(std::string(e.what()).find("beta") != std::string::npos);
    }
    AeroTable c{{"alpha"}, {{0.0, 1.0}}, {0.0}};
    CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("buildup with zero perturbations returns the clean coefficients exactly") {
    const AeroDatabase db = make_reference_database();
    FlightCondition fc;
    fc.alpha = 3.7;
    fc.beta = -4.2;
    fc.airspeed = 25.0;
    const auto out = coefficient_buildup(db, fc);
    for (Coefficient c : kAllCoefficients) {
        const std::array<double, 2> at{fc.alpha, fc.beta};
        CHECK(out.coefficients[c] == interpolate(db[c].baseline, at).value);
    }
    CHECK_FALSE(out.baseline_only);
}

TEST_CASE("pitch-rate increment matches hand evaluation") {
    AeroDatabase db = constant_db();
    db[Coefficient::Cm].rate_increments["q"] = AeroTable::constant({"alpha", "q"}, {{-20, 30}, {-2, 2}}, -1.0);
    FlightCondition fc;
    fc.airspeed = 25.0;
    fc.q = 0.1;
    const double expected = -1.0 * (0.2995 * 0.1) / (2.0 * 25.0);
    CHECK(std::abs(coefficient_buildup(db, fc).coefficients.Cm - expected) < 1e-12);
    CHECK(std::abs(expected - (-5.99e-4)) < 1e-12);
}

TEST_CASE("yaw-rate increment uses the span") {
    AeroDatabase db = constant_db();
    db[Coefficient::Cn].rate_increments["r"] = AeroTable::constant({"alpha", "r"}, {{-20, 30}, {-2, 2}}, -0.2);
    FlightCondition fc;
    fc.airspeed = 20.0;
    fc.r = 0.5;
    CHECK(coefficient_buildup(db, fc).coefficients.Cn == doctest::Approx(-0.2 * 2.0 * 0.5 / 40.0));
}

TEST_CASE("lateral coefficients are odd in sideslip") {
    const AeroDatabase db = make_reference_database();
    FlightCondition fc;
    fc.airspeed = 25.0;
    for (double a : {-12.0, 0.0, 7.3}) {
        for (double b : {2.5, 6.1, 14.0}) {
            fc.alpha = a;
            fc.beta = b;
            const auto pos = coefficient_buildup(db, fc).coefficients;
            fc.beta = -b;
            const auto neg = coefficient_buildup(db, fc).coefficients;
            CHECK(neg.CY == doctest::Approx(-pos.CY).epsilon(1e-12));
            CHECK(neg.Cl == doctest::Approx(-pos.Cl).epsilon(1e-12));
            CHECK(neg.Cn == doctest::Approx(-pos.Cn).epsilon(1e-12));
        }
    }
}

TEST_CASE("buildup is linear in deflection for constant control tables") {
    const AeroDatabase db = make_reference_database();
    FlightCondition fc;
    fc.airspeed = 25.0;
    fc.alpha = 2.0;
    const double base = coefficient_buildup(db, fc).coefficients.Cm;
    fc.deflections["elevator"] = 5.0;
    const double d1 = coefficient_buildup(db, fc).coefficients.Cm - base;
    fc.deflections["elevator"] = 10.0;
    const double d2 = coefficient_buildup(db, fc).coefficients.Cm - base;
    CHECK(d2 == doctest::Approx(2.0 * d1).epsilon(1e-12));
    CHECK(d1 == doctest::Approx(-1.1 * deg2rad(5.0)).epsilon(1e-12));
}

TEST_CASE("zero airspeed falls back to baseline only") {
    const AeroDatabase db = make_reference_database();
    FlightCondition fc;
    fc.q = 1.0;
    fc.p = 1.0;
    const auto out = coefficient_buildup(db, fc);
    CHECK(out.baseline_only);
    CHECK(out.coefficients.Cm == interpolate(db[Coefficient::Cm].baseline, std::array<double, 2>{0.0, 0.0}).value);
}

TEST_CASE("coefficients to forces") {
    vehicle::VehicleParams P;
    FlightCondition fc;
    CoefficientSet k{1.0, 0.3, 0.1, 0.2, 0.05, 0.02};
    const auto zero = coefficients_to_forces(k, fc, P);
    CHECK(zero.force().norm() == 0.0);
    CHECK(zero.moment().norm() == 0.0);

    fc.airspeed = 25.0;
    fc.air_density = 1.225;
    const auto f = coefficients_to_forces(CoefficientSet{1.0, 0, 0, 0, 0, 0}, fc, P);
    CHECK(f.Fz == doctest::Approx(-0.5 * 1.225 * 625.0 * 0.8544));
    CHECK(f.Fz == doctest::Approx(-327.1).epsilon(1e-3));
    CHECK(std::abs(f.Fx) < 1e-12);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ang(-30, 30), c(-1, 1);
    for (int i = 0; i < 200; ++i) {
        fc.alpha = ang(rng);
        fc.beta = ang(rng);
        const CoefficientSet r{c(rng), c(rng), c(rng), c(rng), c(rng), c(rng)};
        const auto out = coefficients_to_forces(r, fc, P);
        const double qs = 0.5 * 1.225 * 625.0 * 0.8544;
        const double wind = qs * std::sqrt(r.CL * r.CL + r.CD * r.CD + r.CY * r.CY);
        CHECK(out.force().norm() == doctest::Approx(wind).epsilon(1e-12));
    }
}

TEST_CASE("flight condition from body state") {
    vehicle::BodyState s;
    s.u = 25.0;
    s.w = 25.0 * std::tan(deg2rad(4.0));
    const auto fc = flight_condition_from_state(s, Vec3::Zero(), 1.225);
    CHECK(fc.alpha == doctest::Approx(4.0));
    CHECK(fc.beta == doctest::Approx(0.0));
    // Headwind adds to airspeed.
    const auto head = flight_condition_from_state(vehicle::BodyState{}, Vec3(-5.0, 0, 0), 1.225);
    CHECK(head.airspeed == doctest::Approx(5.0));
    CHECK(head.alpha == doctest::Approx(0.0));
}

TEST_CASE("database save/load round-trips bit-exactly") {
    const auto dir = temp_dir("roundtrip");
    AeroDatabase db = make_reference_database();
    db[Coefficient::CL].baseline.values[3] = 0.1 + 0.2;  // not representable in short decimal
    save_database(db, dir);
    const AeroDatabase back = load_database(dir);
    CHECK(back == db);
    // Second save is byte-identical.
    const auto dir2 = temp_dir("roundtrip2");
    save_database(back, dir2);
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::ifstream a(entry.path(), std::ios::binary), b(dir2 / entry.path().filename(), std::ios::binary);
        const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
        CHECK(sa == sb);
    }
}

TEST_CASE("non-monotone grid in a table file names the axis") {
    const auto dir = temp_dir("monotone");
    save_database(make_reference_database(), dir);
    {
        std::ofstream out(dir / "Cm_rate_q.csv");
        out << "alpha,q,value\n-20,3,-12\n-20,-3,-12\n30,3,-12\n30,-3,-12\n";
    }
    try {
        load_database(dir);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("Cm_rate_q.csv") != std::string::npos);
        CHECK(msg.find("'q'") != std::string::npos);
    }
}

TEST_CASE("value count mismatch and schema errors") {
    const auto dir = temp_dir("count");
    save_database(make_reference_database(), dir);
    {
        std::ofstream out(dir / "CD_baseline.csv");
        out << "alpha,beta,value\n0,0,1\n0,1,1\n1,0,1\n";
    }
    CHECK_THROWS_AS(load_database(dir), LoadError);

    const auto bad = temp_dir("schema");
    {
        std::ofstream out(bad / "manifest.json");
        out << R"({"format":"vdt-aerodb","geometry":{"wingspan":2}})";
    }
    CHECK_THROWS_AS(load_database(bad), LoadError);
    CHECK_THROWS_AS(load_database(temp_dir("empty")), LoadError);
}

TEST_CASE("increment on the wrong axis set is rejected") {
    AeroDatabase db = make_reference_database();
    db[Coefficient::CL].rate_increments["p"] = AeroTable::constant({"alpha", "p"}, {{-20, 30}, {-1, 1}}, 0.1);
    CHECK_THROWS_AS(db.validate(), ArgumentError);
}
