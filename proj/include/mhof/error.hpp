#pragma once

#include <stdexcept>
#include <string>

namespace mhof {

// File/stream layout violations (bad magic, truncation, ...).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
    FormatError(const std::string& msg, size_t byte_offset)
        : std::runtime_error(msg + " (at byte " + std::to_string(byte_offset) + ")") {}
};

// Bad user configuration or missing/unusable assets, detected before any
// output is produced.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure while producing output (e.g. an unplaceable scene when even one
// actor cannot be placed).
class GenerationError : public std::runtime_error {
public:
    explicit GenerationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mhof
