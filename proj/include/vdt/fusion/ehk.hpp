#pragma once

#include <vdt/fusion/kriging.hpp>

#include <memory>
#include <string>
#include <vector>

namespace vdt::fusion {

/// Closed-form quantities of the hierarchical likelihood for one theta.
struct EHKProfile {
    bool ok = false;
    Eigen::VectorXd rho;
    double sigma_sq = 0.0;
    double log_likelihood = 0.0;
};

/// Generalised least squares for rho and the discrepancy variance at a fixed
/// theta (Z in unit coordinates, F = LF predictions at the HF inputs).
/// ok = false when R cannot be factorised or F^T R^-1 F is singular.
EHKProfile ehk_profile(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const Eigen::MatrixXd& F,
                       const Eigen::VectorXd& theta, double nugget);

/// HF kriging with the scaled LF surrogates as trend.
struct EHKModel {
    std::vector<std::shared_ptr<const KrigingModel>> lf_surrogates;
    std::vector<std::string> lf_names;
    Eigen::VectorXd rho;
    double sigma_d_sq = 0.0;
    Eigen::VectorXd theta_d;
    Eigen::MatrixXd hf_inputs;
    Eigen::VectorXd hf_outputs;
    Eigen::MatrixXd F_lf_at_hf;        // n_HF x L
    InputScaling scaling;
    double nugget = 0.0;
    int nugget_escalations = 0;
    double log_likelihood = 0.0;
    double log_likelihood_at_unit_theta = 0.0;
    Eigen::LLT<Eigen::MatrixXd> hf_correlation_factorization;
    Eigen::VectorXd weights;           // R^-1 (y - F rho)
    Eigen::MatrixXd gls_inverse;       // (F^T R^-1 F)^-1

    Eigen::VectorXd lf_predictions(const Eigen::VectorXd& x) const;
};

struct EHKPrediction {
    double mean = 0.0;
    /// Kriging variance of the discrepancy process (with the GLS trend term).
    double variance = 0.0;
};

/// Throws FitError when there are fewer HF samples than LF models, when
/// F^T R^-1 F is singular (the message names the collinear LF models) or
/// when the HF correlation matrix cannot be factorised.
EHKModel fit_ehk(const Eigen::MatrixXd& hf_inputs, const Eigen::VectorXd& hf_outputs, const Bounds& hf_bounds,
                 std::vector<std::shared_ptr<const KrigingModel>> lf_models, const FusionConfig& cfg,
                 std::vector<std::string> lf_names = {});

EHKModel fit_ehk(const Dataset& hf, const std::string& response,
                 std::vector<std::shared_ptr<const KrigingModel>> lf_models, const FusionConfig& cfg,
                 std::vector<std::string> lf_names = {});

EHKPrediction ehk_predict(const EHKModel& model, const Eigen::VectorXd& x);

/// Leave-one-out residuals at the HF samples with theta and rho held fixed.
Eigen::VectorXd ehk_loo_residuals(const EHKModel& model);

} // namespace vdt::fusion
