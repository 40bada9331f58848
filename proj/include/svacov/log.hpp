//------------------------------------------------------------------------------
// log.hpp
// Minimal leveled logger writing to stderr
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <iostream>
#include <string>
#include <string_view>

namespace svacov::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

inline Level& threshold() {
    static Level lvl = Level::warn;
    return lvl;
}

inline void set_level(Level lvl) {
    threshold() = lvl;
}

inline bool set_level(std::string_view name) {
    if (name == "debug")
        set_level(Level::debug);
    else if (name == "info")
        set_level(Level::info);
    else if (name == "warn")
        set_level(Level::warn);
    else if (name == "error")
        set_level(Level::error);
    else if (name == "off")
        set_level(Level::off);
    else
        return false;
    return true;
}

inline void emit(Level lvl, std::string_view tag, const std::string& msg) {
    if (lvl < threshold())
        return;
    std::cerr << "[" << tag << "] " << msg << "\n";
}

inline void debug(const std::string& msg) { emit(Level::debug, "debug", msg); }
inline void info(const std::string& msg) { emit(Level::info, "info", msg); }
inline void warn(const std::string& msg) { emit(Level::warn, "warn", msg); }
inline void error(const std::string& msg) { emit(Level::error, "error", msg); }

} // namespace svacov::log
