#pragma once
// Library diagnostics on stderr. The level comes from ANTONOV_LOG
// (trace, debug, info, warn, error, off); default warn.

#include <string>

namespace antonov::log {

void init_from_env();
void set_level(const std::string& level);

void debug(const std::string& msg);
void info(const std::string& msg);
void warn(const std::string& msg);
void error(const std::string& msg);

}  // namespace antonov::log
