#include <vdt/fusion/optimizer.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace vdt::fusion {

namespace {

double safe(double v) {
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
}

} // namespace

SearchResult maximize_in_box(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& start, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                             int max_evaluations) {
    const auto d = start.size();
    const auto project = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.cwiseMax(lo).cwiseMin(hi); };
    SearchResult res;
    const auto eval = [&](const Eigen::VectorXd& x) {
        ++res.evaluations;
        return safe(objective(x));
    };

    std::vector<Eigen::VectorXd> simplex;
    std::vector<double> f;
    simplex.push_back(project(start));
    f.push_back(eval(simplex[0]));
    for (Eigen::Index k = 0; k < d && res.evaluations < max_evaluations; ++k) {
        Eigen::VectorXd v = simplex[0];
        const double step = 0.1 * (hi[k] - lo[k]);
        v[k] = (v[k] + step <= hi[k]) ? v[k] + step : v[k] - step;
        simplex.push_back(v);
        f.push_back(eval(v));
    }
    if (static_cast<Eigen::Index>(simplex.size()) < d + 1) {
        const auto best = std::max_element(f.begin(), f.end()) - f.begin();
        res.x = simplex[static_cast<std::size_t>(best)];
        res.value = f[static_cast<std::size_t>(best)];
        return res;
    }

    std::vector<std::size_t> order(simplex.size());
    while (res.evaluations < max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];

        double size = 0.0;
        for (const auto& v : simplex) {
            size = std::max(size, (v - simplex[best]).cwiseAbs().maxCoeff());
        }
        if (size < 1e-6 && std::abs(f[best] - f[worst]) <= 1e-10 * (1.0 + std::abs(f[best]))) {
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i != worst) {
                centroid += simplex[i];
            }
        }
        centroid /= static_cast<double>(d);

        const Eigen::VectorXd xr = project(centroid + (centroid - simplex[worst]));
        const double fr = eval(xr);
        if (fr > f[best]) {
            const Eigen::VectorXd xe = project(centroid + 2.0 * (centroid - simplex[worst]));
            const double fe = res.evaluations < max_evaluations ? eval(xe) : -std::numeric_limits<double>::infinity();
            if (fe > fr) {
                simplex[worst] = xe;
                f[worst] = fe;
            } else {
                simplex[worst] = xr;
                f[worst] = fr;
            }
            continue;
        }
        if (fr > f[second]) {
            simplex[worst] = xr;
            f[worst] = fr;
            continue;
        }
        const bool outside = fr > f[worst];
        const Eigen::VectorXd xc =
            outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid)) : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
        if (res.evaluations >= max_evaluations) {
            break;
        }
        const double fc = eval(xc);
        if (fc > (outside ? fr : f[worst])) {
            simplex[worst] = xc;
            f[worst] = fc;
            continue;
        }
        // Shrink towards the best vertex.
        for (std::size_t i = 0; i < simplex.size() && res.evaluations < max_evaluations; ++i) {
            if (i == best) {
                continue;
            }
            simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
            f[i] = eval(simplex[i]);
        }
    }
    const auto best = std::max_element(f.begin(), f.end()) - f.begin();
    res.x = simplex[static_cast<std::size_t>(best)];
    res.value = f[static_cast<std::size_t>(best)];
    return res;
}

SearchResult maximize_multistart(const std::function<double(const Eigen::VectorXd&)>& objective,
                                 const Eigen::MatrixXd& starts, const Eigen::VectorXd& lo,
                                 const Eigen::VectorXd& hi, int evaluations_per_start) {
    SearchResult best;
    best.value = -std::numeric_limits<double>::infinity();
    int total = 0;
    for (Eigen::Index s = 0; s < starts.rows(); ++s) {
        SearchResult r = maximize_in_box(objective, starts.row(s).transpose(), lo, hi, evaluations_per_start);
        total += r.evaluations;
        // Strict comparison keeps the earliest start on ties.
        if (best.x.size() == 0 || r.value > best.value) {
            best = std::move(r);
        }
    }
    best.evaluations = total;
    return best;
}

} // namespace vdt::fusion
