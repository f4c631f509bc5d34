#pragma once

#include <memory>

#include <spdlog/spdlog.h>

namespace cavnet {

// Shared stderr logger. Level comes from CAVNET_LOG (trace, debug, info,
// warn, error, off); default is warn.
std::shared_ptr<spdlog::logger> logger();

}  // namespace cavnet
