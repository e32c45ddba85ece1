#pragma once

// Minimal stderr logging.  Level comes from FEMTOPC_LOG (error|warn|info|debug),
// default warn.

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string_view>

namespace femtopc::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

inline Level level_from_env()
{
    const char* env = std::getenv("FEMTOPC_LOG");
    if (env == nullptr) {
        return Level::Warn;
    }
    const std::string_view v(env);
    if (v == "error") return Level::Error;
    if (v == "info") return Level::Info;
    if (v == "debug") return Level::Debug;
    return Level::Warn;
}

inline Level current_level()
{
    static const Level level = level_from_env();
    return level;
}

inline bool enabled(Level l) { return static_cast<int>(l) <= static_cast<int>(current_level()); }

template <typename... Args>
void write(Level l, const Args&... args)
{
    if (!enabled(l)) {
        return;
    }
    static std::mutex mu;
    std::ostringstream os;
    constexpr const char* names[] = {"error", "warn", "info", "debug"};
    os << "[femtopc " << names[static_cast<int>(l)] << "] ";
    (os << ... << args);
    os << '\n';
    std::lock_guard lock(mu);
    std::cerr << os.str();
}

template <typename... Args> void warn(const Args&... args) { write(Level::Warn, args...); }
template <typename... Args> void info(const Args&... args) { write(Level::Info, args...); }
template <typename... Args> void debug(const Args&... args) { write(Level::Debug, args...); }

} // namespace femtopc::log
