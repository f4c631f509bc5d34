#include "log.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>

namespace cavnet {

std::shared_ptr<spdlog::logger> logger() {
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto log = spdlog::stderr_color_mt("cavnet");
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("CAVNET_LOG"); env != nullptr && *env != '\0') {
      level = spdlog::level::from_str(env);
    }
    log->set_level(level);
    log->set_pattern("[%l] %v");
    return log;
  }();
  return instance;
}

}  // namespace cavnet
