#include <vdt/aero/synthetic.hpp>

#include <vdt/common/math.hpp>

#include <cmath>

namespace vdt::aero {

CoefficientSet reference_coefficients(double alpha_deg, double beta_deg) {
    const double a = deg2rad(alpha_deg);
    const double b = deg2rad(beta_deg);
    const double cl_clean = 0.30 + 4.6 * a - 5.5 * a * a * a;
    CoefficientSet k;
    k.CL = cl_clean * (1.0 - 0.5 * b * b);
    k.CD = 0.028 + 0.06 * cl_clean * cl_clean + 0.3 * b * b;
    k.Cm = 0.04 - 0.8 * a + 0.9 * a * a * a - 0.05 * b * b;
    k.CY = -0.6 * b * (1.0 + 0.3 * a);
    k.Cl = -0.09 * b - 0.15 * a * b;
    k.Cn = 0.07 * b * (1.0 - 0.5 * a);
    return k;
}

namespace {

std::vector<double> linspace_step(double lo, double hi, double step) {
    std::vector<double> g;
    const auto n = static_cast<int>(std::lround((hi - lo) / step));
    for (int i = 0; i <= n; ++i) {
        g.push_back(lo + step * i);
    }
    return g;
}

} // namespace

std::vector<double> default_alpha_grid() { return linspace_step(-20.0, 30.0, 2.5); }
std::vector<double> default_beta_grid() { return linspace_step(-20.0, 20.0, 2.5); }

AeroTable tabulate(const std::function<double(double, double)>& f, const std::vector<double>& alpha_grid,
                   const std::vector<double>& beta_grid) {
    AeroTable t{{"alpha", "beta"}, {alpha_grid, beta_grid}, {}};
    t.values.reserve(alpha_grid.size() * beta_grid.size());
    for (double a : alpha_grid) {
        for (double b : beta_grid) {
            t.values.push_back(f(a, b));
        }
    }
    return t;
}

void install_default_increments(AeroDatabase& db) {
    const std::vector<double> alpha{-20.0, 30.0};
    const std::vector<double> rate{-3.0, 3.0};
    const std::vector<double> deflection{-25.0, 0.0, 25.0};

    auto rate_table = [&](const char* axis, double value) {
        return AeroTable::constant({"alpha", axis}, {alpha, rate}, value);
    };
    auto control_table = [&](const char* surface, double value) {
        return AeroTable::constant({"alpha", deflection_axis(surface)}, {alpha, deflection}, value);
    };
    for (Coefficient c : kAllCoefficients) {
        db[c].rate_increments.clear();
        db[c].control_increments.clear();
    }
    db[Coefficient::CL].rate_increments["q"] = rate_table("q", 5.0);
    db[Coefficient::CL].control_increments["elevator"] = control_table("elevator", 0.4);
    db[Coefficient::CD].control_increments["elevator"] = control_table("elevator", 0.02);
    db[Coefficient::Cm].rate_increments["q"] = rate_table("q", -12.0);
    db[Coefficient::Cm].control_increments["elevator"] = control_table("elevator", -1.1);

    db[Coefficient::CY].rate_increments["p"] = rate_table("p", -0.05);
    db[Coefficient::CY].rate_increments["r"] = rate_table("r", 0.3);
    db[Coefficient::CY].control_increments["rudder"] = control_table("rudder", 0.15);
    db[Coefficient::Cl].rate_increments["p"] = rate_table("p", -0.45);
    db[Coefficient::Cl].rate_increments["r"] = rate_table("r", 0.1);
    db[Coefficient::Cl].control_increments["aileron"] = control_table("aileron", 0.25);
    db[Coefficient::Cl].control_increments["rudder"] = control_table("rudder", 0.01);
    db[Coefficient::Cn].rate_increments["p"] = rate_table("p", -0.03);
    db[Coefficient::Cn].rate_increments["r"] = rate_table("r", -0.12);
    db[Coefficient::Cn].control_increments["aileron"] = control_table("aileron", -0.01);
    db[Coefficient::Cn].control_increments["rudder"] = control_table("rudder", -0.08);
}

AeroDatabase make_reference_database() {
    AeroDatabase db;
    const auto ag = default_alpha_grid();
    const auto bg = default_beta_grid();
    for (Coefficient c : kAllCoefficients) {
        db[c].baseline = tabulate([c](double a, double b) { return reference_coefficients(a, b)[c]; }, ag, bg);
    }
    install_default_increments(db);
    return db;
}

} // namespace vdt::aero
