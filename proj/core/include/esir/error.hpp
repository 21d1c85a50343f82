#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace esir {

enum class ErrorCode {
    NotSymmetric,
    NoConvergence,
    NearSingular,
    NotPositiveDefinite,
    RankDeficient,
    DuplicatePoints,
    AllPairsDegenerate,
    TooFewPoints,
    KTooLarge,
    DegenerateDirection,
    RankDeficientDesign,
    DegenerateSample,
    TooManyFailures,
    MissingCell,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every library failure surfaces as this exception; `code()` identifies the
/// contract that was violated so callers (notably the CLI) can map it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// Input-shape problems versus numerical breakdowns.
    bool is_numerical() const noexcept;

private:
    ErrorCode code_;
};

}  // namespace esir
