#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace protpat {

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input content. Carries the 1-based line number when known (0 otherwise).
class ParseError : public IoError {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : IoError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Input is valid but too empty or degenerate to compute the requested quantity.
class DegenerateDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace protpat
