#pragma once

#include <charconv>
#include <string>

namespace hsfuse {

/// Shortest round-trippable decimal representation of a double. Deterministic
/// (locale-free), so repeated runs serialize identical bytes.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Fixed-precision representation for layout-sensitive output (SVG paths).
inline std::string format_fixed(double v, int digits = 2) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    return std::string(buf, res.ptr);
}

} // namespace hsfuse
