#pragma once

#include <stdexcept>
#include <string>

namespace spgs {

enum class ErrorCode {
    invalid_argument,
    initialization_failure,
    stagnation,
    bracket_failure,
    stiffness_failure,
    non_convergence,
    positivity_loss,
    range_failure,
    config_error,
    verification_failure,
    internal
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
    if (!condition) fail(ErrorCode::invalid_argument, message);
}

} // namespace spgs
