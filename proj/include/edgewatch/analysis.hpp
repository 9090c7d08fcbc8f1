#pragma once

// Log-log regressions turning the near-edge asymptotics into slope checks.

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edgewatch/floquet.hpp"
#include "edgewatch/resonance.hpp"
#include "edgewatch/spectrum.hpp"

namespace edgewatch {

struct PowerLawFit {
    double slope = 0.0;
    double intercept = 0.0;  // log y = intercept + slope * log x
    double r_squared = 0.0;
    int n_points = 0;
    std::string x_name;
    std::string y_name;
};

/// OLS on (log x, log y). Needs >= 4 points with x, y > 0; throws
/// DegenerateData when all x coincide.
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points, std::string x_name = "x",
                          std::string y_name = "y");

/// pass: slope within tolerance of expected and, unless expected is 0, R^2 >= 0.95.
struct FitCheck {
    PowerLawFit fit;
    double expected = 0.0;
    double tolerance = 0.3;
    bool pass = false;
    std::string note;
};

struct ScalingReport {
    double e0 = 0.0;
    EdgeClass classification = EdgeClass::GenericA;
    int L = 0;
    double eps = 0.0;
    std::vector<FitCheck> fits;  // eigenvalue, weight, spacing, then width when available
    std::vector<std::string> notes;

    bool pass() const;
};

/// Indices below this are left out of the slope fits.
inline constexpr int kFitFirstIndex = 3;

/// Fits of lambda_k - E0, a_k and lambda_{k+1} - lambda_k against k + 1 over
/// the weight_profile window, and |Im z_n| against n + 1 over the resonances.
/// For a non-generic edge the weight slope is expected near 0 and the width
/// fit is omitted. Throws OutOfDomain for an edge outside (-2, 2) and
/// TooFewPoints when fewer than 5 rows or resonances are available.
ScalingReport scaling_report(const SpectralData& sd, std::span<const Resonance> resonances, const EdgeData& edge,
                             double eps);

struct LPoint {
    int L = 0;
    int j = 0;
    int n = 0;
    double abs_im_z = 0.0;
};

/// Fit of |Im z_n| against L. Needs >= 3 distinct L with one residue j
/// (MixedResidues otherwise); with require_same_n, also one n. The fit
/// itself needs 4 points, so 3 values of L end in TooFewPoints.
PowerLawFit l_scaling(std::span<const LPoint> points, bool require_same_n = true);

/// Computes |Im z_n| for each L at the edge nearest to e0, with n = n_of_L(L).
std::vector<LPoint> l_scaling_points(const PeriodicPotential& v, double e0, std::span<const int> Ls,
                                     const std::function<int(int)>& n_of_L, const SweepOptions& opts = {},
                                     const EigensystemOptions& eig = {});

struct SeedAccuracyRow {
    int n = 0;
    double error = 0.0;  // |z_n - seed_n|
    double abs_im_z = 0.0;
    double ratio = 0.0;  // error * L^5 |alpha_n|^3 / (n+1)^4
};

struct SeedAccuracy {
    int L = 0;
    std::vector<SeedAccuracyRow> rows;
    double max_ratio = 0.0;
};

SeedAccuracy seed_accuracy(std::span<const Resonance> resonances, int L);

}  // namespace edgewatch
