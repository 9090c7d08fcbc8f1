#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace edgewatch {

enum class ErrorKind {
    InvalidArgument,
    RootFindingFailure,
    OutsideSpectrum,
    EdgeSingularity,
    DegenerateS,
    NotAnEdge,
    ConvergenceFailure,
    AmbiguousAssignment,
    TooFewPoints,
    OnBranchCut,
    PoleHit,
    NoConvergence,
    AdaptiveDepthExceeded,
    EdgeTooCloseToEigenvalue,
    NonGenericEdge,
    UniquenessFailed,
    EigenvalueInInterval,
    EmptyRegion,
    DegenerateData,
    MixedResidues,
    OutOfDomain,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `index()` carries the eigenvalue or
/// resonance index the failure refers to, when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::optional<std::int64_t> index = std::nullopt)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), index_(index) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::int64_t> index() const noexcept { return index_; }

private:
    ErrorKind kind_;
    std::optional<std::int64_t> index_;
};

}  // namespace edgewatch
