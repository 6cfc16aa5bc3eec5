#include <vdt/fusion/kriging.hpp>

#include <vdt/common/errors.hpp>
#include <vdt/fusion/lhs.hpp>
#include <vdt/fusion/optimizer.hpp>

#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>
#include <numeric>

namespace vdt::fusion {

namespace {

constexpr double kVarianceFloor = 1e-300;

Eigen::VectorXd pow10(const Eigen::VectorXd& log_theta) {
    return log_theta.unaryExpr([](double v) { return std::pow(10.0, v); });
}

} // namespace

InputScaling InputScaling::from_bounds(const Bounds& bounds) {
    bounds.validate();
    const auto m = static_cast<Eigen::Index>(bounds.dimensions());
    InputScaling s;
    s.offset.resize(m);
    s.scale.resize(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        s.offset[k] = bounds.ranges[static_cast<std::size_t>(k)].first;
        s.scale[k] = bounds.ranges[static_cast<std::size_t>(k)].second - s.offset[k];
    }
    return s;
}

Eigen::VectorXd InputScaling::apply(const Eigen::VectorXd& x) const {
    return (x - offset).cwiseQuotient(scale);
}

Eigen::MatrixXd InputScaling::apply_rows(const Eigen::MatrixXd& X) const {
    return (X.rowwise() - offset.transpose()).array().rowwise() / scale.transpose().array();
}

double gaussian_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& theta) {
    return std::exp(-(theta.array() * (a - b).array().square()).sum());
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& Z, const Eigen::VectorXd& theta, double nugget) {
    const auto n = Z.rows();
    Eigen::MatrixXd R(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        R(j, j) = 1.0 + nugget;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < Z.cols(); ++k) {
                const double d = Z(i, k) - Z(j, k);
                s += theta[k] * d * d;
            }
            R(i, j) = R(j, i) = std::exp(-s);
        }
    }
    return R;
}

Eigen::VectorXd correlation_vector(const Eigen::MatrixXd& Z, const Eigen::VectorXd& z, const Eigen::VectorXd& theta,
                                   double nugget) {
    Eigen::VectorXd r(Z.rows());
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < Z.cols(); ++k) {
            const double d = Z(i, k) - z[k];
            s += theta[k] * d * d;
        }
        r[i] = s == 0.0 && (Z.row(i).transpose() - z).cwiseAbs().maxCoeff() == 0.0 ? 1.0 + nugget : std::exp(-s);
    }
    return r;
}

bool factorize(const Eigen::MatrixXd& R, double nugget, Eigen::LLT<Eigen::MatrixXd>& llt) {
    llt.compute(R);
    if (llt.info() != Eigen::Success) {
        return false;
    }
    const double min_pivot = llt.matrixLLT().diagonal().minCoeff();
    const double floor = std::max(0.5 * nugget, static_cast<double>(R.rows()) * std::numeric_limits<double>::epsilon());
    return std::isfinite(min_pivot) && min_pivot * min_pivot >= floor;
}

double ordinary_log_likelihood(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                               double nugget) {
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (!factorize(correlation_matrix(Z, theta, nugget), nugget, llt)) {
        return -std::numeric_limits<double>::infinity();
    }
    const auto n = static_cast<double>(y.size());
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(y.size());
    const Eigen::VectorXd r1 = llt.solve(ones);
    const Eigen::VectorXd ry = llt.solve(y);
    const double mu = ones.dot(ry) / ones.dot(r1);
    const double sigma_sq = std::max((y - mu * ones).dot(ry - mu * r1) / n, kVarianceFloor);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * (n * std::log(sigma_sq) + log_det);
}

double KrigingModel::predict(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd z = scaling.apply(x);
    return trend_mean + correlation_vector(unit_inputs, z, theta, nugget).dot(weights);
}

double KrigingModel::predict_variance(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd r = correlation_vector(unit_inputs, scaling.apply(x), theta, nugget);
    const Eigen::VectorXd rinv_r = correlation_factorization.solve(r);
    const double u = 1.0 - rinv_r.sum();
    const double s = 1.0 - r.dot(rinv_r) + u * u / rinv_ones.sum();
    return std::max(0.0, process_variance * s);
}

Eigen::MatrixXd log_theta_starts(std::size_t dims, const FusionConfig& cfg, std::uint64_t salt) {
    const auto m = static_cast<Eigen::Index>(dims);
    const auto count = static_cast<std::size_t>(cfg.multistart_count);
    Eigen::MatrixXd starts(static_cast<Eigen::Index>(count), m);
    starts.row(0).setZero();
    if (count > 1) {
        Bounds box;
        box.ranges.assign(dims, {std::log10(cfg.theta_min), std::log10(cfg.theta_max)});
        starts.bottomRows(static_cast<Eigen::Index>(count - 1)) = lhs_sample(box, count - 1, cfg.rng_seed ^ salt);
    }
    // theta = 1 may lie outside narrowed bounds.
    for (Eigen::Index k = 0; k < m; ++k) {
        starts(0, k) = std::clamp(0.0, std::log10(cfg.theta_min), std::log10(cfg.theta_max));
    }
    return starts;
}

std::vector<Eigen::Index> subsample_indices(Eigen::Index n, std::size_t count, std::uint64_t seed) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    if (count >= idx.size()) {
        return idx;
    }
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const auto remaining = idx.size() - i;
        const auto j = i + std::min(static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(remaining)),
                                    remaining - 1);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

KrigingModel fit_kriging(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs, const Bounds& bounds,
                         const FusionConfig& cfg) {
    cfg.validate();
    const auto n = inputs.rows();
    const auto m = inputs.cols();
    if (outputs.size() != n) {
        throw ArgumentError("fit_kriging: output count does not match input rows");
    }
    if (n < m + 1) {
        throw ArgumentError("fit_kriging: need at least m + 1 samples");
    }
    if (static_cast<Eigen::Index>(bounds.dimensions()) != m) {
        throw ArgumentError("fit_kriging: bounds dimension does not match inputs");
    }

    KrigingModel model;
    model.scaling = InputScaling::from_bounds(bounds);
    model.training_inputs = inputs;
    model.training_outputs = outputs;
    model.unit_inputs = model.scaling.apply_rows(inputs);
    const Eigen::MatrixXd& Z = model.unit_inputs;

    const auto sub = subsample_indices(n, cfg.mle_subsample, cfg.rng_seed);
    Eigen::MatrixXd Zs(static_cast<Eigen::Index>(sub.size()), m);
    Eigen::VectorXd ys(static_cast<Eigen::Index>(sub.size()));
    for (std::size_t i = 0; i < sub.size(); ++i) {
        Zs.row(static_cast<Eigen::Index>(i)) = Z.row(sub[i]);
        ys[static_cast<Eigen::Index>(i)] = outputs[sub[i]];
    }

    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(m, std::log10(cfg.theta_min));
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(m, std::log10(cfg.theta_max));
    const Eigen::MatrixXd starts = log_theta_starts(static_cast<std::size_t>(m), cfg, 0x6b726967u);
    const int per_start = cfg.optimizer_budget / cfg.multistart_count;

    double search_nugget = cfg.nugget;
    SearchResult best;
    while (true) {
        const auto objective = [&](const Eigen::VectorXd& lt) {
            return ordinary_log_likelihood(Zs, ys, pow10(lt), search_nugget);
        };
        best = maximize_multistart(objective, starts, lo, hi, per_start);
        if (std::isfinite(best.value) || search_nugget >= cfg.max_nugget) {
            break;
        }
        search_nugget = std::min(cfg.max_nugget, std::max(search_nugget * 10.0, 1e-12));
        spdlog::debug("kriging likelihood search: raising nugget to {:g}", search_nugget);
    }
    model.theta = pow10(best.x);

    double nugget = std::max(cfg.nugget, 0.0);
    double min_pivot = 0.0;
    while (true) {
        if (factorize(correlation_matrix(Z, model.theta, nugget), nugget, model.correlation_factorization)) {
            break;
        }
        if (model.correlation_factorization.info() == Eigen::Success) {
            min_pivot = model.correlation_factorization.matrixLLT().diagonal().minCoeff();
        }
        if (nugget >= cfg.max_nugget) {
            throw FitError("kriging correlation matrix is numerically singular (n = " + std::to_string(n) +
                           ", smallest Cholesky pivot " + std::to_string(min_pivot) + ") even with nugget " +
                           std::to_string(nugget));
        }
        nugget = std::min(cfg.max_nugget, std::max(nugget * 10.0, 1e-12));
        ++model.nugget_escalations;
        spdlog::info("kriging fit: nugget escalated to {:g}", nugget);
    }
    model.nugget = nugget;

    const auto& llt = model.correlation_factorization;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    model.rinv_ones = llt.solve(ones);
    const Eigen::VectorXd ry = llt.solve(outputs);
    model.trend_mean = ones.dot(ry) / ones.dot(model.rinv_ones);
    model.weights = ry - model.trend_mean * model.rinv_ones;
    const Eigen::VectorXd res = outputs - model.trend_mean * ones;
    model.process_variance = std::max(res.dot(model.weights) / static_cast<double>(n), 0.0);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    model.log_likelihood =
        -0.5 * (static_cast<double>(n) * std::log(std::max(model.process_variance, kVarianceFloor)) + log_det);
    return model;
}

KrigingModel fit_kriging(const Dataset& data, const std::string& response, const FusionConfig& cfg) {
    data.validate();
    return fit_kriging(data.inputs, data.response(response), data.bounds, cfg);
}

} // namespace vdt::fusion
