#pragma once

#include <string_view>

namespace safe {

enum class LogLevel { debug, info, warn, error, off };

void set_log_level(LogLevel level);
LogLevel log_level();

void log_message(LogLevel level, std::string_view message);
inline void log_warn(std::string_view message) { log_message(LogLevel::warn, message); }
inline void log_info(std::string_view message) { log_message(LogLevel::info, message); }

}  // namespace safe
