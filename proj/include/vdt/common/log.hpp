#pragma once

#include <spdlog/spdlog.h>

namespace vdt {

/// Applies the VDT_LOG_LEVEL environment variable (trace, debug, info, warn,
/// error, off) to the default logger. Unset leaves the level at warn.
void configure_logging_from_env();

} // namespace vdt
