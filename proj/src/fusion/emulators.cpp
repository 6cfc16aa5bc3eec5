#include <vdt/fusion/emulators.hpp>

#include <vdt/aero/synthetic.hpp>
#include <vdt/common/errors.hpp>
#include <vdt/common/math.hpp>
#include <vdt/fusion/lhs.hpp>

#include <cmath>

namespace vdt::fusion {

using aero::CoefficientSet;
using aero::reference_coefficients;

namespace {

CoefficientSet hetlas(double alpha_deg, double beta_deg) {
    // Panel-method flavour: lift slope slightly low, stall onset early.
    const double a = deg2rad(alpha_deg);
    const double b = deg2rad(beta_deg);
    CoefficientSet k = reference_coefficients(alpha_deg, beta_deg);
    k.CL = 0.93 * k.CL + 0.02 - 0.35 * a * a;
    k.CD = 0.85 * k.CD + 0.006 + 0.02 * a * a;
    k.Cm = 0.9 * k.Cm + 0.012 + 0.04 * a * a;
    k.CY = 0.9 * k.CY - 0.04 * a * b;
    k.Cl = 0.85 * k.Cl + 0.03 * a * b;
    k.Cn = 1.1 * k.Cn - 0.02 * a * b;
    return k;
}

CoefficientSet avl(double alpha_deg, double beta_deg) {
    // Vortex-lattice flavour: linear lift without stall, too much lift and a
    // strong nose-down moment, inviscid drag.
    const double a = deg2rad(alpha_deg);
    const double b = deg2rad(beta_deg);
    CoefficientSet k = reference_coefficients(alpha_deg, beta_deg);
    const double cl_linear = (0.30 + 4.6 * a) * (1.0 - 0.5 * b * b);
    k.CL = 1.25 * cl_linear + 0.08;
    k.CD = 0.7 * k.CD - 0.004 - 0.01 * a;
    k.Cm = 1.2 * k.Cm - 0.08;
    k.CY = 1.15 * k.CY + 0.3 * b * b * b;
    k.Cl = 1.2 * k.Cl - 0.2 * b * b * b;
    k.Cn = 0.8 * k.Cn + 0.1 * b * b * b;
    return k;
}

CoefficientSet xflr5(double alpha_deg, double beta_deg) {
    const double a = deg2rad(alpha_deg);
    const double b = deg2rad(beta_deg);
    CoefficientSet k = reference_coefficients(alpha_deg, beta_deg);
    k.CL = 1.1 * k.CL - 0.04 + 0.1 * a * b;
    k.CD = 1.15 * k.CD - 0.004 + 0.03 * a * a * a;
    k.Cm = 0.85 * k.Cm - 0.02 + 0.06 * a * b;
    k.CY = 0.8 * k.CY + 0.05 * b * a * a;
    k.Cl = 0.9 * k.Cl - 0.05 * b * a * a;
    k.Cn = 1.2 * k.Cn + 0.02 * b * a * a;
    return k;
}

double normal_draw(std::mt19937_64& rng) {
    // Box-Muller on the portable uniform draw.
    const double u1 = 1.0 - unit_uniform(rng);
    const double u2 = unit_uniform(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

} // namespace

Bounds analysis_bounds() {
    return Bounds{{{-20.0, 30.0}, {0.0, 20.0}}};
}

std::vector<ToolEmulator> standard_emulators() {
    return {
        {"hetlas", "LF", 1200, 0.0, hetlas},
        {"avl", "LF", 1200, 0.0, avl},
        {"xflr5", "LF", 1200, 0.0, xflr5},
        {"fluent", "HF", 25, 0.0, reference_coefficients},
    };
}

ToolEmulator find_emulator(const std::string& name) {
    for (auto& t : standard_emulators()) {
        if (t.name == name) {
            return t;
        }
    }
    throw ArgumentError("unknown analysis tool '" + name + "' (expected hetlas, avl, xflr5 or fluent)");
}

Dataset emulate_at(const ToolEmulator& tool, const Eigen::MatrixXd& inputs, std::uint64_t seed) {
    Dataset ds;
    ds.input_names = {"alpha", "beta"};
    ds.response_names.clear();
    for (aero::Coefficient c : aero::kAllCoefficients) {
        ds.response_names.emplace_back(aero::to_string(c));
    }
    ds.fidelity_tag = tool.fidelity;
    ds.tool = tool.name;
    ds.bounds = analysis_bounds();
    ds.inputs = inputs;
    ds.outputs.resize(inputs.rows(), static_cast<Eigen::Index>(aero::kAllCoefficients.size()));
    std::mt19937_64 rng(seed ^ 0x6e6f697365ULL);
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        const CoefficientSet k = tool.model(inputs(i, 0), inputs(i, 1));
        for (std::size_t c = 0; c < aero::kAllCoefficients.size(); ++c) {
            double v = k[aero::kAllCoefficients[c]];
            if (tool.noise_sigma > 0.0) {
                v += tool.noise_sigma * normal_draw(rng);
            }
            ds.outputs(i, static_cast<Eigen::Index>(c)) = v;
        }
    }
    return ds;
}

Dataset emulate_dataset(const ToolEmulator& tool, std::size_t n, std::uint64_t seed) {
    return emulate_at(tool, lhs_sample(analysis_bounds(), n, seed), seed);
}

std::uint64_t tool_seed(std::uint64_t seed, std::size_t tool_index) {
    return seed * 0x9E3779B97F4A7C15ULL + 0x2545F4914F6CDD1DULL * (tool_index + 1);
}

Scenario make_scenario(std::uint64_t seed) {
    Scenario s;
    const auto tools = standard_emulators();
    for (std::size_t i = 0; i < tools.size(); ++i) {
        Dataset ds = emulate_dataset(tools[i], tools[i].samples, tool_seed(seed, i));
        if (tools[i].fidelity == "HF") {
            s.hf = std::move(ds);
        } else {
            s.lf.push_back(std::move(ds));
        }
    }
    return s;
}

} // namespace vdt::fusion
