#pragma once

#include <stdexcept>
#include <string>

namespace saddleflow {

enum class ErrorCode {
    DimensionMismatch,
    InvalidData,
    InvalidArgument,
    RankDeficient,
    MaxIterations,
    NoFiniteHit,
    MaxLoops,
    PostconditionFailed,
    StepUnderflow,
    Diverged,
    NonMonotone,
    Stalled,
    SaddleMismatch,
    Degenerate,
    TooManySubsets,
    Io,
};

[[nodiscard]] constexpr const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidData: return "InvalidData";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::MaxIterations: return "MaxIterations";
        case ErrorCode::NoFiniteHit: return "NoFiniteHit";
        case ErrorCode::MaxLoops: return "MaxLoops";
        case ErrorCode::PostconditionFailed: return "PostconditionFailed";
        case ErrorCode::StepUnderflow: return "StepUnderflow";
        case ErrorCode::Diverged: return "Diverged";
        case ErrorCode::NonMonotone: return "NonMonotone";
        case ErrorCode::Stalled: return "Stalled";
        case ErrorCode::SaddleMismatch: return "SaddleMismatch";
        case ErrorCode::Degenerate: return "Degenerate";
        case ErrorCode::TooManySubsets: return "TooManySubsets";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the Python bindings) can dispatch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace saddleflow
