#pragma once

#include <Eigen/Core>

#include <functional>

namespace vdt::fusion {

struct SearchResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int evaluations = 0;
};

/// Nelder-Mead maximisation restricted to the box [lo, hi] (trial points are
/// projected onto the box). Non-finite objective values count as -infinity.
SearchResult maximize_in_box(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& start, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                             int max_evaluations);

/// Runs maximize_in_box from each row of `starts` and returns the best.
SearchResult maximize_multistart(const std::function<double(const Eigen::VectorXd&)>& objective,
                                 const Eigen::MatrixXd& starts, const Eigen::VectorXd& lo,
                                 const Eigen::VectorXd& hi, int evaluations_per_start);

} // namespace vdt::fusion
