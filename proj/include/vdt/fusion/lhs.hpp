#pragma once

#include <vdt/fusion/dataset.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace vdt::fusion {

/// Uniform double in [0, 1) from the top 53 bits of one generator draw;
/// identical on every standard library.
double unit_uniform(std::mt19937_64& rng);

/// Latin hypercube design: along every dimension the n samples fall one per
/// equal-width stratum. Deterministic for a fixed seed. Throws DomainError on
/// degenerate bounds or n == 0.
Eigen::MatrixXd lhs_sample(const Bounds& bounds, std::size_t n, std::uint64_t seed);

} // namespace vdt::fusion
