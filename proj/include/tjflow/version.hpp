#pragma once

namespace tjflow {

inline constexpr const char* kVersion = "0.1.0";

} // namespace tjflow
