#include "antonov/log.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <memory>
#include <stdexcept>

namespace antonov::log {

namespace {
spdlog::logger& logger()
{
    static const std::shared_ptr<spdlog::logger> lg = [] {
        auto l = spdlog::stderr_logger_mt("antonov");
        l->set_pattern("[%l] %v");
        l->set_level(spdlog::level::warn);
        return l;
    }();
    return *lg;
}
}  // namespace

void set_level(const std::string& level)
{
    const auto lv = spdlog::level::from_str(level);
    if (lv == spdlog::level::off && level != "off") throw std::invalid_argument("unknown log level: " + level);
    logger().set_level(lv);
}

void init_from_env()
{
    if (const char* v = std::getenv("ANTONOV_LOG")) set_level(v);
}

void debug(const std::string& msg) { logger().debug(msg); }
void info(const std::string& msg) { logger().info(msg); }
void warn(const std::string& msg) { logger().warn(msg); }
void error(const std::string& msg) { logger().error(msg); }

}  // namespace antonov::log
