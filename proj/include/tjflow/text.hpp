#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "tjflow/errors.hpp"

namespace tjflow {

/// Shortest representation that round-trips exactly; locale-independent.
/// All numeric file output goes through this so that write -> read -> write
/// is byte-identical.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s, long line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError("expected a number, got '" + std::string(s) + "'", line_no);
    return v;
}

inline long long parse_int(std::string_view s, long line_no) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError("expected an integer, got '" + std::string(s) + "'", line_no);
    return v;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace tjflow
