#include "sonarnet/nodes/log.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace sonarnet::log {

namespace {

Level parse_env() {
    const char* env = std::getenv("SONARNET_LOG");
    if (env == nullptr) return Level::warn;
    if (std::strcmp(env, "debug") == 0) return Level::debug;
    if (std::strcmp(env, "info") == 0) return Level::info;
    if (std::strcmp(env, "warn") == 0) return Level::warn;
    if (std::strcmp(env, "error") == 0) return Level::error;
    if (std::strcmp(env, "off") == 0) return Level::off;
    return Level::warn;
}

std::atomic<int>& level_storage() {
    static std::atomic<int> lvl{static_cast<int>(parse_env())};
    return lvl;
}

const char* name(Level lvl) {
    switch (lvl) {
        case Level::debug: return "debug";
        case Level::info: return "info";
        case Level::warn: return "warn";
        case Level::error: return "error";
        case Level::off: return "off";
    }
    return "?";
}

} // namespace

Level level() { return static_cast<Level>(level_storage().load(std::memory_order_relaxed)); }

void set_level(Level lvl) { level_storage().store(static_cast<int>(lvl)); }

void write(Level lvl, const std::string& message) {
    static std::mutex mutex;
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    const auto us = std::chrono::duration_cast<std::chrono::microseconds>(now).count();
    std::lock_guard lock(mutex);
    std::fprintf(stderr, "[%lld.%06lld] %-5s %s\n", static_cast<long long>(us / 1000000),
                 static_cast<long long>(us % 1000000), name(lvl), message.c_str());
}

} // namespace sonarnet::log
