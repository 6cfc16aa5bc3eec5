#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace vdt::fusion {

/// Per-dimension [lo, hi] box.
struct Bounds {
    std::vector<std::pair<double, double>> ranges;

    std::size_t dimensions() const { return ranges.size(); }
    /// Throws DomainError if any range is degenerate (lo >= hi) or non-finite.
    void validate() const;
    bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
};

/// Samples of one analysis source: n input points and one or more named
/// responses per point.
struct Dataset {
    std::vector<std::string> input_names;   // e.g. alpha, beta
    Eigen::MatrixXd inputs;                 // n x m
    std::vector<std::string> response_names;  // e.g. CL ... Cn
    Eigen::MatrixXd outputs;                // n x responses
    std::string fidelity_tag;               // "HF" or "LF"
    std::string tool;                       // producing analysis tool
    Bounds bounds;

    std::size_t size() const { return static_cast<std::size_t>(inputs.rows()); }
    std::size_t dimensions() const { return static_cast<std::size_t>(inputs.cols()); }

    /// Column of a named response; throws ArgumentError if absent.
    Eigen::VectorXd response(const std::string& name) const;

    /// Throws ArgumentError on duplicate input rows (within 1e-12), fewer
    /// than m + 1 samples, points outside the bounds or non-finite values.
    void validate() const;
};

/// CSV with header (inputs..., responses...) plus a JSON sidecar next to it
/// (same stem, .json) carrying fidelity tag, tool name, input names and bounds.
Dataset load_dataset(const std::filesystem::path& csv_path);
void save_dataset(const Dataset& ds, const std::filesystem::path& csv_path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

} // namespace vdt::fusion
