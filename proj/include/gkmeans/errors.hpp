#pragma once

#include <stdexcept>
#include <string>

namespace gkmeans {

// Bad flags, bad config values, k > m and friends. CLI maps this to exit 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable/unparseable input data. CLI maps this to exit 3.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace gkmeans
