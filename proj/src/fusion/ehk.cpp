#include <vdt/fusion/ehk.hpp>

#include <vdt/common/errors.hpp>
#include <vdt/fusion/optimizer.hpp>

#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>

namespace vdt::fusion {

namespace {

constexpr double kVarianceFloor = 1e-300;
constexpr double kCollinearTolerance = 1e-12;

Eigen::VectorXd pow10(const Eigen::VectorXd& log_theta) {
    return log_theta.unaryExpr([](double v) { return std::pow(10.0, v); });
}

bool gls_matrix_singular(const Eigen::MatrixXd& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
    const double max_ev = eig.eigenvalues().cwiseAbs().maxCoeff();
    return !(max_ev > 0.0) || eig.eigenvalues().minCoeff() <= kCollinearTolerance * max_ev;
}

std::string collinear_models(const Eigen::MatrixXd& A, const std::vector<std::string>& names) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
    const Eigen::VectorXd null_dir = eig.eigenvectors().col(0);
    std::string out;
    for (Eigen::Index l = 0; l < null_dir.size(); ++l) {
        if (std::abs(null_dir[l]) > 0.1) {
            out += (out.empty() ? "" : ", ") + names[static_cast<std::size_t>(l)];
        }
    }
    return out;
}

} // namespace

EHKProfile ehk_profile(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const Eigen::MatrixXd& F,
                       const Eigen::VectorXd& theta, double nugget) {
    EHKProfile p;
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (!factorize(correlation_matrix(Z, theta, nugget), nugget, llt)) {
        return p;
    }
    const Eigen::MatrixXd rinv_f = llt.solve(F);
    const Eigen::VectorXd rinv_y = llt.solve(y);
    const Eigen::MatrixXd A = F.transpose() * rinv_f;
    if (gls_matrix_singular(A)) {
        return p;
    }
    p.rho = A.ldlt().solve(F.transpose() * rinv_y);
    const Eigen::VectorXd res = y - F * p.rho;
    const auto n = static_cast<double>(y.size());
    p.sigma_sq = std::max(res.dot(rinv_y - rinv_f * p.rho) / n, 0.0);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    p.log_likelihood = -0.5 * (n * std::log(std::max(p.sigma_sq, kVarianceFloor)) + log_det);
    p.ok = p.rho.allFinite() && std::isfinite(p.log_likelihood);
    return p;
}

Eigen::VectorXd EHKModel::lf_predictions(const Eigen::VectorXd& x) const {
    Eigen::VectorXd f(static_cast<Eigen::Index>(lf_surrogates.size()));
    for (std::size_t l = 0; l < lf_surrogates.size(); ++l) {
        f[static_cast<Eigen::Index>(l)] = lf_surrogates[l]->predict(x);
    }
    return f;
}

EHKModel fit_ehk(const Eigen::MatrixXd& hf_inputs, const Eigen::VectorXd& hf_outputs, const Bounds& hf_bounds,
                 std::vector<std::shared_ptr<const KrigingModel>> lf_models, const FusionConfig& cfg,
                 std::vector<std::string> lf_names) {
    cfg.validate();
    const auto n = hf_inputs.rows();
    const auto m = hf_inputs.cols();
    const auto L = static_cast<Eigen::Index>(lf_models.size());
    if (L == 0) {
        throw ArgumentError("fit_ehk needs at least one low-fidelity model");
    }
    if (hf_outputs.size() != n) {
        throw ArgumentError("fit_ehk: HF output count does not match input rows");
    }
    for (const auto& lf : lf_models) {
        if (!lf || static_cast<Eigen::Index>(lf->dimensions()) != m) {
            throw ArgumentError("fit_ehk: every LF model must share the HF input dimension");
        }
    }
    if (lf_names.empty()) {
        for (Eigen::Index l = 0; l < L; ++l) {
            lf_names.push_back("LF" + std::to_string(l));
        }
    }
    if (static_cast<Eigen::Index>(lf_names.size()) != L) {
        throw ArgumentError("fit_ehk: LF name count does not match LF models");
    }
    if (n < L) {
        throw FitError("fit_ehk: " + std::to_string(n) + " HF samples cannot determine " + std::to_string(L) +
                       " scaling factors");
    }

    EHKModel model;
    model.lf_surrogates = std::move(lf_models);
    model.lf_names = std::move(lf_names);
    model.hf_inputs = hf_inputs;
    model.hf_outputs = hf_outputs;
    model.scaling = InputScaling::from_bounds(hf_bounds);
    const Eigen::MatrixXd Z = model.scaling.apply_rows(hf_inputs);
    model.F_lf_at_hf.resize(n, L);
    for (Eigen::Index i = 0; i < n; ++i) {
        model.F_lf_at_hf.row(i) = model.lf_predictions(hf_inputs.row(i).transpose()).transpose();
    }
    const Eigen::MatrixXd& F = model.F_lf_at_hf;

    // Collinearity does not depend on theta in any useful way; check it once
    // at theta = 1 so the error can name the models.
    {
        double nug = cfg.nugget;
        Eigen::LLT<Eigen::MatrixXd> llt;
        const Eigen::VectorXd unit = Eigen::VectorXd::Ones(m);
        while (!factorize(correlation_matrix(Z, unit, nug), nug, llt) && nug < cfg.max_nugget) {
            nug = std::min(cfg.max_nugget, std::max(nug * 10.0, 1e-12));
        }
        if (llt.info() == Eigen::Success) {
            const Eigen::MatrixXd A = F.transpose() * llt.solve(F);
            if (gls_matrix_singular(A)) {
                throw FitError("fit_ehk: low-fidelity models are collinear at the HF samples (" +
                               collinear_models(A, model.lf_names) + "); scaling factors are not identifiable");
            }
        }
    }

    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(m, std::log10(cfg.theta_min));
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(m, std::log10(cfg.theta_max));
    const Eigen::MatrixXd starts = log_theta_starts(static_cast<std::size_t>(m), cfg, 0x65686b64u);
    const int per_start = cfg.optimizer_budget / cfg.multistart_count;

    double search_nugget = cfg.nugget;
    SearchResult best;
    while (true) {
        const auto objective = [&](const Eigen::VectorXd& lt) {
            const EHKProfile p = ehk_profile(Z, hf_outputs, F, pow10(lt), search_nugget);
            return p.ok ? p.log_likelihood : -std::numeric_limits<double>::infinity();
        };
        best = maximize_multistart(objective, starts, lo, hi, per_start);
        model.log_likelihood_at_unit_theta = objective(starts.row(0).transpose());
        if (std::isfinite(best.value) || search_nugget >= cfg.max_nugget) {
            break;
        }
        search_nugget = std::min(cfg.max_nugget, std::max(search_nugget * 10.0, 1e-12));
        spdlog::debug("EHK likelihood search: raising nugget to {:g}", search_nugget);
    }
    model.theta_d = pow10(best.x);

    double nugget = cfg.nugget;
    while (!factorize(correlation_matrix(Z, model.theta_d, nugget), nugget, model.hf_correlation_factorization)) {
        if (nugget >= cfg.max_nugget) {
            throw FitError("fit_ehk: HF correlation matrix is numerically singular even with nugget " +
                           std::to_string(nugget));
        }
        nugget = std::min(cfg.max_nugget, std::max(nugget * 10.0, 1e-12));
        ++model.nugget_escalations;
        spdlog::info("EHK fit: nugget escalated to {:g}", nugget);
    }
    model.nugget = nugget;

    const auto& llt = model.hf_correlation_factorization;
    const Eigen::MatrixXd rinv_f = llt.solve(F);
    const Eigen::MatrixXd A = F.transpose() * rinv_f;
    if (gls_matrix_singular(A)) {
        throw FitError("fit_ehk: low-fidelity models are collinear at the HF samples (" +
                       collinear_models(A, model.lf_names) + ")");
    }
    const EHKProfile p = ehk_profile(Z, hf_outputs, F, model.theta_d, nugget);
    model.rho = p.rho;
    model.sigma_d_sq = p.sigma_sq;
    model.log_likelihood = p.log_likelihood;
    model.gls_inverse = A.inverse();
    model.weights = llt.solve(hf_outputs - F * model.rho);
    return model;
}

EHKModel fit_ehk(const Dataset& hf, const std::string& response,
                 std::vector<std::shared_ptr<const KrigingModel>> lf_models, const FusionConfig& cfg,
                 std::vector<std::string> lf_names) {
    hf.validate();
    return fit_ehk(hf.inputs, hf.response(response), hf.bounds, std::move(lf_models), cfg, std::move(lf_names));
}

EHKPrediction ehk_predict(const EHKModel& model, const Eigen::VectorXd& x) {
    const Eigen::MatrixXd Z = model.scaling.apply_rows(model.hf_inputs);
    const Eigen::VectorXd r = correlation_vector(Z, model.scaling.apply(x), model.theta_d, model.nugget);
    const Eigen::VectorXd f = model.lf_predictions(x);
    EHKPrediction out;
    out.mean = f.dot(model.rho) + r.dot(model.weights);
    const Eigen::VectorXd rinv_r = model.hf_correlation_factorization.solve(r);
    const Eigen::VectorXd u = f - model.F_lf_at_hf.transpose() * rinv_r;
    out.variance = std::max(0.0, model.sigma_d_sq * (1.0 - r.dot(rinv_r) + u.dot(model.gls_inverse * u)));
    return out;
}

Eigen::VectorXd ehk_loo_residuals(const EHKModel& model) {
    const auto n = model.hf_inputs.rows();
    const Eigen::MatrixXd rinv = model.hf_correlation_factorization.solve(Eigen::MatrixXd::Identity(n, n));
    return model.weights.cwiseQuotient(rinv.diagonal());
}

} // namespace vdt::fusion
