#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace stairscale {

/// Error categories. The CLI prints the code verbatim, so keep these stable.
enum class ErrorCode {
    Domain,
    Precondition,
    Parameter,
    DegenerateSequence,
    NotNullSequence,
    IncomparableSectors,
    Resource,
    Solver,
    NotJumpDifferentiable,
    Format,
};

[[nodiscard]] constexpr const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Domain: return "domain";
        case ErrorCode::Precondition: return "precondition";
        case ErrorCode::Parameter: return "parameter";
        case ErrorCode::DegenerateSequence: return "degenerate_sequence";
        case ErrorCode::NotNullSequence: return "not_null_sequence";
        case ErrorCode::IncomparableSectors: return "incomparable_sectors";
        case ErrorCode::Resource: return "resource";
        case ErrorCode::Solver: return "solver";
        case ErrorCode::NotJumpDifferentiable: return "not_jump_differentiable";
        case ErrorCode::Format: return "format";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace stairscale
