#pragma once

#include <string>

namespace verikit::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3 };

// Minimum level that gets emitted; default info.
void set_level(Level level);
Level level();

// When enabled, lines are emitted as {"level":...,"msg":...} JSON objects.
void set_json(bool enabled);

void emit(Level level, const std::string& message);

inline void debug(const std::string& msg) { emit(Level::debug, msg); }
inline void info(const std::string& msg) { emit(Level::info, msg); }
inline void warn(const std::string& msg) { emit(Level::warn, msg); }
inline void error(const std::string& msg) { emit(Level::error, msg); }

}  // namespace verikit::log
