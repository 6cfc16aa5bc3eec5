#include <vdt/common/log.hpp>

#include <cstdlib>
#include <string>

namespace vdt {

void configure_logging_from_env() {
    const char* env = std::getenv("VDT_LOG_LEVEL");
    if (env == nullptr) {
        spdlog::set_level(spdlog::level::warn);
        return;
    }
    spdlog::set_level(spdlog::level::from_str(env));
}

} // namespace vdt
