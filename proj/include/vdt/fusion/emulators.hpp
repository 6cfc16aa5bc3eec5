#pragma once

#include <vdt/aero/database.hpp>
#include <vdt/fusion/dataset.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace vdt::fusion {

/// Synthetic stand-in for one aerodynamic analysis tool: the analytic
/// reference coefficients passed through a tool-specific bias, plus optional
/// Gaussian noise.
struct ToolEmulator {
    std::string name;
    std::string fidelity;      // "HF" or "LF"
    std::size_t samples = 0;   // default sample count of a campaign
    double noise_sigma = 0.0;  // absolute, applied to every coefficient
    std::function<aero::CoefficientSet(double alpha_deg, double beta_deg)> model;
};

/// alpha in [-20, 30] deg, beta in [0, 20] deg.
Bounds analysis_bounds();

/// hetlas, avl, xflr5 (LF, 1200 samples each) and fluent (HF, 25 samples,
/// unbiased).
std::vector<ToolEmulator> standard_emulators();

/// Throws ArgumentError for unknown names.
ToolEmulator find_emulator(const std::string& name);

/// Evaluates the emulator on an LHS design over analysis_bounds().
Dataset emulate_dataset(const ToolEmulator& tool, std::size_t n, std::uint64_t seed);

/// Evaluates the emulator at given (alpha, beta) rows.
Dataset emulate_at(const ToolEmulator& tool, const Eigen::MatrixXd& inputs, std::uint64_t seed);

struct Scenario {
    Dataset hf;
    std::vector<Dataset> lf;
};

/// Full campaign with the default sample counts; each tool gets its own
/// seed derived from `seed`.
Scenario make_scenario(std::uint64_t seed);

/// Per-tool seed derived from a campaign seed.
std::uint64_t tool_seed(std::uint64_t seed, std::size_t tool_index);

} // namespace vdt::fusion
