#pragma once

#include <vdt/aero/database.hpp>
#include <vdt/fusion/ehk.hpp>

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace vdt::fusion {

/// Output grid of the compiled database. With mirror_beta the beta grid must
/// be non-negative; the table is extended to -beta using the airframe's
/// lateral symmetry (longitudinal coefficients even, lateral odd, lateral
/// values at beta = 0 set to 0).
struct GridSpec {
    std::vector<double> alpha;
    std::vector<double> beta;
    bool mirror_beta = true;

    /// alpha -20..30 and beta 0..20 at 2.5 deg, mirrored.
    static GridSpec standard();
};

struct CoefficientReport {
    std::string coefficient;
    std::vector<std::string> sources;
    std::vector<double> rho;
    double sigma_d_sq = 0.0;
    std::vector<double> theta_d;
    double log_likelihood = 0.0;
    double log_likelihood_at_unit_theta = 0.0;
    double nugget = 0.0;
    int nugget_escalations = 0;
    /// Leave-one-out RMSE of the fused model at the HF samples.
    double fused_cv_rmse = 0.0;
    /// RMSE of each LF surrogate against the HF samples (never trained on them).
    std::vector<double> lf_rmse;
};

struct FusionReport {
    std::size_t hf_samples = 0;
    std::string hf_tool;
    std::vector<std::string> lf_tools;
    std::vector<std::size_t> lf_samples;
    std::vector<CoefficientReport> coefficients;

    nlohmann::json to_json() const;
};

struct FusionResult {
    aero::AeroDatabase database;
    FusionReport report;
    std::map<aero::Coefficient, EHKModel> models;
};

/// Fits one ordinary-kriging surrogate per (LF dataset, coefficient), one
/// EHK model per coefficient, and tabulates the fused means on the grid.
/// Increment tables are copied from `increments` when given, else the
/// default increments are installed. Fit errors are rethrown with the
/// coefficient name prefixed.
FusionResult fuse_aerodb(const Dataset& hf, const std::vector<Dataset>& lf, const GridSpec& grid,
                         const FusionConfig& cfg, const aero::AeroDatabase* increments = nullptr);

/// Single-source database: ordinary kriging of one dataset tabulated on the
/// grid (used to fly a mission on one tool's data alone).
aero::AeroDatabase surrogate_aerodb(const Dataset& ds, const GridSpec& grid, const FusionConfig& cfg,
                                    const aero::AeroDatabase* increments = nullptr);

/// Tabulates per-coefficient predictors on the grid (with mirroring).
aero::AeroDatabase tabulate_database(const std::function<double(aero::Coefficient, double, double)>& predict,
                                     const GridSpec& grid, const aero::AeroDatabase* increments);

} // namespace vdt::fusion
