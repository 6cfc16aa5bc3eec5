#include <vdt/fusion/config.hpp>

#include <vdt/common/errors.hpp>

#include <cmath>

namespace vdt::fusion {

void FusionConfig::validate() const {
    if (!(nugget >= 0.0) || !(max_nugget >= nugget)) {
        throw ArgumentError("nugget must be non-negative and not exceed max_nugget");
    }
    if (!(theta_min > 0.0) || !(theta_max > theta_min) || !std::isfinite(theta_max)) {
        throw ArgumentError("theta bounds must be positive with theta_min < theta_max");
    }
    if (multistart_count < 1) {
        throw ArgumentError("multistart_count must be at least 1");
    }
    if (optimizer_budget < multistart_count) {
        throw ArgumentError("optimizer_budget must allow one evaluation per start");
    }
    if (mle_subsample < 2) {
        throw ArgumentError("mle_subsample must be at least 2");
    }
}

} // namespace vdt::fusion
