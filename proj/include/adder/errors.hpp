#pragma once

#include <stdexcept>
#include <string>

namespace adder {

// Error categories map 1:1 onto CLI exit codes (see tools/adder_main.cpp).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed stream contents: bad magic, truncated event, reserved D value, ...
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace adder
