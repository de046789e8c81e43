#include "spgs/error.hpp"

namespace spgs {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::initialization_failure: return "initialization_failure";
        case ErrorCode::stagnation: return "stagnation";
        case ErrorCode::bracket_failure: return "bracket_failure";
        case ErrorCode::stiffness_failure: return "stiffness_failure";
        case ErrorCode::non_convergence: return "non_convergence";
        case ErrorCode::positivity_loss: return "positivity_loss";
        case ErrorCode::range_failure: return "range_failure";
        case ErrorCode::config_error: return "config_error";
        case ErrorCode::verification_failure: return "verification_failure";
        case ErrorCode::internal: return "internal";
    }
    return "unknown";
}

} // namespace spgs
