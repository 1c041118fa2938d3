#pragma once

#include <stdexcept>
#include <string>

namespace tjflow {

/// Invalid configuration or contract violation; CLI maps this to exit 1.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input data; carries the 1-based line number when known.
struct ParseError : std::runtime_error {
    long line;
    ParseError(const std::string& msg, long line_no)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + msg),
          line(line_no) {}
};

/// Filesystem-level failure; CLI maps this to exit 2.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tjflow
