#pragma once

#include <string>

namespace roisub {

// Log level comes from the ROISUB_LOG environment variable:
// debug | info | warn | error | off. Default is warn.
enum class LogLevel { debug = 0, info, warn, error, off };

LogLevel log_level();

void log_message(LogLevel level, const std::string& message);

inline void log_debug(const std::string& m) { log_message(LogLevel::debug, m); }
inline void log_info(const std::string& m) { log_message(LogLevel::info, m); }
inline void log_warn(const std::string& m) { log_message(LogLevel::warn, m); }
inline void log_error(const std::string& m) { log_message(LogLevel::error, m); }

}  // namespace roisub
