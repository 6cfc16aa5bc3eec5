#include <vdt/fusion/fuse.hpp>

#include <vdt/aero/synthetic.hpp>
#include <vdt/common/errors.hpp>

#include <spdlog/spdlog.h>

#include <cmath>

namespace vdt::fusion {

using aero::AeroDatabase;
using aero::Coefficient;

GridSpec GridSpec::standard() {
    GridSpec g;
    g.alpha = aero::default_alpha_grid();
    for (double b = 0.0; b <= 20.0 + 1e-9; b += 2.5) {
        g.beta.push_back(b);
    }
    g.mirror_beta = true;
    return g;
}

nlohmann::json FusionReport::to_json() const {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : coefficients) {
        nlohmann::json rho = nlohmann::json::object();
        nlohmann::json lf = nlohmann::json::object();
        for (std::size_t l = 0; l < c.sources.size(); ++l) {
            rho[c.sources[l]] = c.rho[l];
            lf[c.sources[l]] = c.lf_rmse[l];
        }
        coeffs.push_back({{"coefficient", c.coefficient},
                          {"rho", rho},
                          {"sigma_d_sq", c.sigma_d_sq},
                          {"theta_d", c.theta_d},
                          {"log_likelihood", c.log_likelihood},
                          {"log_likelihood_at_unit_theta", c.log_likelihood_at_unit_theta},
                          {"nugget", c.nugget},
                          {"nugget_escalations", c.nugget_escalations},
                          {"fused_cv_rmse", c.fused_cv_rmse},
                          {"lf_rmse_vs_hf", lf}});
    }
    return {{"hf_tool", hf_tool},
            {"hf_samples", hf_samples},
            {"lf_tools", lf_tools},
            {"lf_samples", lf_samples},
            {"variance_model", "kriging variance of the discrepancy process, with GLS scaling-factor term"},
            {"fused_cv", "leave-one-out at HF samples, hyperparameters and rho held fixed"},
            {"coefficients", coeffs}};
}

AeroDatabase tabulate_database(const std::function<double(Coefficient, double, double)>& predict,
                               const GridSpec& grid, const AeroDatabase* increments) {
    if (grid.alpha.size() < 2 || grid.beta.empty()) {
        throw ArgumentError("fusion grid needs at least two alpha nodes and one beta node");
    }
    std::vector<double> beta_out;
    if (grid.mirror_beta) {
        for (double b : grid.beta) {
            if (b < 0.0) {
                throw ArgumentError("mirrored fusion grid needs non-negative beta nodes");
            }
        }
        for (auto it = grid.beta.rbegin(); it != grid.beta.rend(); ++it) {
            if (*it > 0.0) {
                beta_out.push_back(-*it);
            }
        }
    }
    beta_out.insert(beta_out.end(), grid.beta.begin(), grid.beta.end());
    if (beta_out.size() < 2) {
        throw ArgumentError("fusion grid needs at least two beta nodes");
    }

    AeroDatabase db;
    if (increments != nullptr) {
        db = *increments;
    } else {
        aero::install_default_increments(db);
    }
    for (Coefficient c : aero::kAllCoefficients) {
        const bool odd = !aero::is_longitudinal(c);
        db[c].baseline = aero::tabulate(
            [&](double a, double b) {
                if (!grid.mirror_beta) {
                    return predict(c, a, b);
                }
                if (odd && b == 0.0) {
                    return 0.0;
                }
                const double v = predict(c, a, std::abs(b));
                return (odd && b < 0.0) ? -v : v;
            },
            grid.alpha, beta_out);
    }
    db.validate();
    return db;
}

FusionResult fuse_aerodb(const Dataset& hf, const std::vector<Dataset>& lf, const GridSpec& grid,
                         const FusionConfig& cfg, const AeroDatabase* increments) {
    cfg.validate();
    hf.validate();
    if (lf.empty()) {
        throw ArgumentError("fuse_aerodb needs at least one LF dataset");
    }
    for (const auto& ds : lf) {
        ds.validate();
        if (ds.input_names != hf.input_names) {
            throw ArgumentError("LF dataset '" + ds.tool + "' does not share the HF input space");
        }
    }
    for (double a : grid.alpha) {
        for (double b : grid.beta) {
            if (!hf.bounds.contains(Eigen::Vector2d(a, b))) {
                throw ArgumentError("fusion grid node (" + std::to_string(a) + ", " + std::to_string(b) +
                                    ") lies outside the HF bounds");
            }
        }
    }

    FusionResult result;
    result.report.hf_samples = hf.size();
    result.report.hf_tool = hf.tool;
    std::vector<std::string> names;
    for (const auto& ds : lf) {
        names.push_back(ds.tool);
        result.report.lf_tools.push_back(ds.tool);
        result.report.lf_samples.push_back(ds.size());
    }

    for (Coefficient c : aero::kAllCoefficients) {
        const std::string cname(aero::to_string(c));
        try {
            std::vector<std::shared_ptr<const KrigingModel>> surrogates;
            for (const auto& ds : lf) {
                surrogates.push_back(std::make_shared<const KrigingModel>(fit_kriging(ds, cname, cfg)));
            }
            EHKModel model = fit_ehk(hf, cname, surrogates, cfg, names);

            CoefficientReport rep;
            rep.coefficient = cname;
            rep.sources = names;
            rep.rho.assign(model.rho.data(), model.rho.data() + model.rho.size());
            rep.sigma_d_sq = model.sigma_d_sq;
            rep.theta_d.assign(model.theta_d.data(), model.theta_d.data() + model.theta_d.size());
            rep.log_likelihood = model.log_likelihood;
            rep.log_likelihood_at_unit_theta = model.log_likelihood_at_unit_theta;
            rep.nugget = model.nugget;
            rep.nugget_escalations = model.nugget_escalations;
            const auto n = static_cast<double>(hf.size());
            rep.fused_cv_rmse = std::sqrt(ehk_loo_residuals(model).squaredNorm() / n);
            for (Eigen::Index l = 0; l < model.F_lf_at_hf.cols(); ++l) {
                rep.lf_rmse.push_back(std::sqrt((model.F_lf_at_hf.col(l) - model.hf_outputs).squaredNorm() / n));
            }
            spdlog::info("fused {}: rho {}, sigma_d^2 {:.3g}, LOO RMSE {:.3g}", cname,
                         nlohmann::json(rep.rho).dump(), rep.sigma_d_sq, rep.fused_cv_rmse);
            result.report.coefficients.push_back(std::move(rep));
            result.models.emplace(c, std::move(model));
        } catch (const FitError& e) {
            throw FitError(cname + ": " + e.what());
        }
    }

    result.database = tabulate_database(
        [&](Coefficient c, double a, double b) { return ehk_predict(result.models.at(c), Eigen::Vector2d(a, b)).mean; },
        grid, increments);
    return result;
}

AeroDatabase surrogate_aerodb(const Dataset& ds, const GridSpec& grid, const FusionConfig& cfg,
                              const AeroDatabase* increments) {
    ds.validate();
    std::map<Coefficient, KrigingModel> models;
    for (Coefficient c : aero::kAllCoefficients) {
        const std::string cname(aero::to_string(c));
        try {
            models.emplace(c, fit_kriging(ds, cname, cfg));
        } catch (const FitError& e) {
            throw FitError(cname + ": " + e.what());
        }
    }
    return tabulate_database(
        [&](Coefficient c, double a, double b) { return models.at(c).predict(Eigen::Vector2d(a, b)); }, grid,
        increments);
}

} // namespace vdt::fusion
