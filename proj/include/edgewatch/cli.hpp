#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "edgewatch/analysis.hpp"

namespace edgewatch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the `edgewatch` tool. Artifacts go to `out` unless
/// --output names a file; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Shortest decimal string that parses back to exactly x.
std::string format_double(double x);

nlohmann::ordered_json to_json(const PowerLawFit& fit);
PowerLawFit fit_from_json(const nlohmann::json& j);

}  // namespace edgewatch::cli
