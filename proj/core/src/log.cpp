#include "cdca/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace cdca {
namespace {

LogLevel read_level_from_env() {
  const char* raw = std::getenv("CDCA_SIM_LOG");
  if (raw == nullptr) return LogLevel::error;
  if (std::strcmp(raw, "trace") == 0) return LogLevel::trace;
  if (std::strcmp(raw, "info") == 0) return LogLevel::info;
  return LogLevel::error;
}

void emit(const char* tag, const std::string& msg) {
  std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

}  // namespace

LogLevel log_level() {
  static const LogLevel level = read_level_from_env();
  return level;
}

void log_error(const std::string& msg) { emit("error", msg); }

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info) emit("info", msg);
}

void log_trace(const std::string& msg) {
  if (log_level() >= LogLevel::trace) emit("trace", msg);
}

}  // namespace cdca
