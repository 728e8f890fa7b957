#ifndef CDCA_LOG_HPP
#define CDCA_LOG_HPP

#include <string>

namespace cdca {

// Verbosity is taken from the CDCA_SIM_LOG environment variable:
// error (default), info, trace.
enum class LogLevel : int { error = 0, info = 1, trace = 2 };

LogLevel log_level();

void log_error(const std::string& msg);
void log_info(const std::string& msg);
void log_trace(const std::string& msg);

}  // namespace cdca

#endif  // CDCA_LOG_HPP
