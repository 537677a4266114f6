#include "verikit/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

#include <json.hpp>

namespace verikit::log {

namespace {
std::atomic<Level> g_level{Level::info};
std::atomic<bool> g_json{false};
std::mutex g_mutex;

const char* prefix(Level level) {
  switch (level) {
    case Level::debug: return "DEBUG";
    case Level::info: return "INFO";
    case Level::warn: return "WARN";
    case Level::error: return "ERROR";
  }
  return "?";
}
}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }
void set_json(bool enabled) { g_json = enabled; }

void emit(Level level, const std::string& message) {
  if (static_cast<int>(level) < static_cast<int>(g_level.load())) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  if (g_json) {
    nlohmann::json line{{"level", prefix(level)}, {"msg", message}};
    std::cerr << line.dump() << '\n';
  } else {
    std::cerr << prefix(level) << ": " << message << '\n';
  }
}

}  // namespace verikit::log
