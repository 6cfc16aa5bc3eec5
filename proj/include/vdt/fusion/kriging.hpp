#pragma once

#include <vdt/fusion/config.hpp>
#include <vdt/fusion/dataset.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <vector>

namespace vdt::fusion {

/// Affine map of raw inputs onto the unit box spanned by a dataset's bounds.
/// Kernel hyperparameters are expressed in these unit coordinates.
struct InputScaling {
    Eigen::VectorXd offset;
    Eigen::VectorXd scale;

    static InputScaling from_bounds(const Bounds& bounds);
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& X) const;
};

/// Second-order Gaussian correlation exp(-sum_k theta_k (a_k - b_k)^2).
double gaussian_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& theta);

/// Correlation matrix of the rows of Z (unit coordinates), nugget on the diagonal.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& Z, const Eigen::VectorXd& theta, double nugget);

/// Correlations between z and every row of Z. A row identical to z gets
/// 1 + nugget, matching the diagonal of the regularised R, so predictions
/// reproduce training samples exactly.
Eigen::VectorXd correlation_vector(const Eigen::MatrixXd& Z, const Eigen::VectorXd& z, const Eigen::VectorXd& theta,
                                   double nugget = 0.0);

/// Cholesky of R + nugget*I with a health check: the factorisation must
/// succeed and every squared pivot must reach half the nugget (in exact
/// arithmetic each is >= nugget) and n * machine epsilon.
bool factorize(const Eigen::MatrixXd& R, double nugget, Eigen::LLT<Eigen::MatrixXd>& llt);

/// Concentrated log-likelihood of ordinary kriging (constant trend) for a
/// given theta. Returns -inf when the correlation matrix cannot be factorised.
double ordinary_log_likelihood(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                               double nugget);

/// Ordinary kriging surrogate of one response.
struct KrigingModel {
    Eigen::VectorXd theta;
    double process_variance = 0.0;
    double trend_mean = 0.0;
    Eigen::MatrixXd training_inputs;   // raw coordinates, n x m
    Eigen::VectorXd training_outputs;
    InputScaling scaling;
    Eigen::MatrixXd unit_inputs;       // training inputs in unit coordinates
    double nugget = 0.0;
    int nugget_escalations = 0;
    double log_likelihood = 0.0;
    Eigen::LLT<Eigen::MatrixXd> correlation_factorization;
    Eigen::VectorXd weights;           // R^-1 (y - mu 1)
    Eigen::VectorXd rinv_ones;         // R^-1 1

    std::size_t dimensions() const { return static_cast<std::size_t>(training_inputs.cols()); }
    double predict(const Eigen::VectorXd& x) const;
    /// Ordinary-kriging mean squared error, including the trend-estimation term.
    double predict_variance(const Eigen::VectorXd& x) const;
};

/// Fits one response of `data`. Theta maximises the concentrated
/// log-likelihood (multistart Nelder-Mead in log10 theta); the final model
/// factorises all samples, escalating the nugget by x10 up to
/// cfg.max_nugget. Throws FitError when no nugget yields a healthy
/// factorisation.
KrigingModel fit_kriging(const Dataset& data, const std::string& response, const FusionConfig& cfg);

/// Same, from raw arrays.
KrigingModel fit_kriging(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs, const Bounds& bounds,
                         const FusionConfig& cfg);

/// Starting points in log10 theta: the first row is theta = 1, the rest form a
/// seeded LHS over the bounds.
Eigen::MatrixXd log_theta_starts(std::size_t dims, const FusionConfig& cfg, std::uint64_t salt);

/// Deterministic subsample indices (seeded LHS-free shuffle), sorted.
std::vector<Eigen::Index> subsample_indices(Eigen::Index n, std::size_t count, std::uint64_t seed);

} // namespace vdt::fusion
