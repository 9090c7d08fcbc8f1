#include "edgewatch/error.hpp"

namespace edgewatch {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::RootFindingFailure: return "RootFindingFailure";
        case ErrorKind::OutsideSpectrum: return "OutsideSpectrum";
        case ErrorKind::EdgeSingularity: return "EdgeSingularity";
        case ErrorKind::DegenerateS: return "DegenerateS";
        case ErrorKind::NotAnEdge: return "NotAnEdge";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::AmbiguousAssignment: return "AmbiguousAssignment";
        case ErrorKind::TooFewPoints: return "TooFewPoints";
        case ErrorKind::OnBranchCut: return "OnBranchCut";
        case ErrorKind::PoleHit: return "PoleHit";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::AdaptiveDepthExceeded: return "AdaptiveDepthExceeded";
        case ErrorKind::EdgeTooCloseToEigenvalue: return "EdgeTooCloseToEigenvalue";
        case ErrorKind::NonGenericEdge: return "NonGenericEdge";
        case ErrorKind::UniquenessFailed: return "UniquenessFailed";
        case ErrorKind::EigenvalueInInterval: return "EigenvalueInInterval";
        case ErrorKind::EmptyRegion: return "EmptyRegion";
        case ErrorKind::DegenerateData: return "DegenerateData";
        case ErrorKind::MixedResidues: return "MixedResidues";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
    }
    return "Unknown";
}

}  // namespace edgewatch
