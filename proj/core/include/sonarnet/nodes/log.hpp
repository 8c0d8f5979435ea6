#pragma once

#include <sstream>
#include <string>

namespace sonarnet::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

// Level comes from SONARNET_LOG (debug|info|warn|error|off) on first use;
// override programmatically with set_level.
Level level();
void set_level(Level level);

void write(Level level, const std::string& message);

namespace detail {
template <typename... Args>
void emit(Level lvl, Args&&... args) {
    if (lvl < level()) return;
    std::ostringstream s;
    (s << ... << args);
    write(lvl, s.str());
}
} // namespace detail

template <typename... Args>
void debug(Args&&... args) {
    detail::emit(Level::debug, std::forward<Args>(args)...);
}
template <typename... Args>
void info(Args&&... args) {
    detail::emit(Level::info, std::forward<Args>(args)...);
}
template <typename... Args>
void warn(Args&&... args) {
    detail::emit(Level::warn, std::forward<Args>(args)...);
}
template <typename... Args>
void error(Args&&... args) {
    detail::emit(Level::error, std::forward<Args>(args)...);
}

} // namespace sonarnet::log
