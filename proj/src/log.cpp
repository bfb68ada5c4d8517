#include "roisub/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace roisub {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("ROISUB_LOG");
    if (env == nullptr) return LogLevel::warn;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    if (std::strcmp(env, "warn") == 0) return LogLevel::warn;
    if (std::strcmp(env, "error") == 0) return LogLevel::error;
    if (std::strcmp(env, "off") == 0) return LogLevel::off;
    return LogLevel::warn;
  }();
  return level;
}

void log_message(LogLevel level, const std::string& message) {
  if (level < log_level()) return;
  static const char* names[] = {"debug", "info", "warn", "error"};
  std::fprintf(stderr, "[roisub:%s] %s\n", names[static_cast<int>(level)], message.c_str());
}

}  // namespace roisub
