#pragma once

#include <cstdint>

namespace vdt::fusion {

/// Knobs of the likelihood search. Bounds apply to theta in normalised
/// (unit-box) input coordinates.
struct FusionConfig {
    double nugget = 1e-8;
    double max_nugget = 1e-4;      // escalation stops here (x10 steps)
    double theta_min = 1e-3;
    double theta_max = 1e3;
    int multistart_count = 8;
    int optimizer_budget = 480;    // likelihood evaluations per fit
    std::uint64_t rng_seed = 0;
    /// Larger training sets pick theta on a deterministic subsample of this
    /// size, then factorise the full set once.
    std::size_t mle_subsample = 200;

    /// Throws ArgumentError on non-positive bounds or multistart_count < 1.
    void validate() const;
};

} // namespace vdt::fusion
