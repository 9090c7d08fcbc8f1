#pragma once

// Property checks run by `edgewatch verify` on a user-chosen potential.

#include <cstdint>
#include <string>
#include <vector>

#include "edgewatch/floquet.hpp"

namespace edgewatch {

struct SuiteResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<SuiteResult> run_property_suites(const PeriodicPotential& v, int L, std::uint64_t seed = 0);

}  // namespace edgewatch
