#pragma once

#include <stdexcept>
#include <string>

namespace hsfuse {

/// Violated pre-condition, malformed input description, or bad configuration.
/// The CLI maps this to exit code 2; plain std::runtime_error maps to 1.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

namespace detail {

[[noreturn]] inline void fail_validation(const std::string& msg) {
    throw validation_error(msg);
}

inline void require(bool ok, const std::string& msg) {
    if (!ok) fail_validation(msg);
}

} // namespace detail
} // namespace hsfuse
