#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dicke {

// Dimension, nonzero or time budget exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed configuration or device file. Carries the 1-based line number.
class ParseError : public std::invalid_argument {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::invalid_argument("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dicke
