#include <vdt/fusion/lhs.hpp>

#include <vdt/common/errors.hpp>

#include <numeric>

namespace vdt::fusion {

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Eigen::MatrixXd lhs_sample(const Bounds& bounds, std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        throw DomainError("lhs_sample needs at least one sample");
    }
    bounds.validate();
    std::mt19937_64 rng(seed);
    const std::size_t m = bounds.dimensions();
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    std::vector<std::size_t> perm(n);
    for (std::size_t k = 0; k < m; ++k) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        // Fisher-Yates with the portable draw above.
        for (std::size_t i = n; i-- > 1;) {
            const auto j = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(i + 1));
            std::swap(perm[i], perm[std::min(j, i)]);
        }
        const auto [lo, hi] = bounds.ranges[k];
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (static_cast<double>(perm[i]) + unit_uniform(rng)) / static_cast<double>(n);
            design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = lo + u * (hi - lo);
        }
    }
    return design;
}

} // namespace vdt::fusion
