#pragma once

// Resonances of the half-line operator obtained by attaching the free
// half-line to the Dirichlet section H_L: the zeros of
//   f(E) = S_L(E) + exp(-i theta(E)),   S_L(E) = sum_k a_k / (lambda_k - E),
// with 2 cos(theta(E)) = E and theta = -Arccos(E / 2) (principal Arccos).

#include <complex>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "edgewatch/error.hpp"
#include "edgewatch/floquet.hpp"
#include "edgewatch/spectrum.hpp"
#include "edgewatch/winding.hpp"

namespace edgewatch {

/// Throws OnBranchCut for real E with |E| >= 2.
Complex theta(Complex e);
/// exp(-i theta(E)) = E/2 + i sqrt(1 - E^2/4).
Complex exp_minus_i_theta(Complex e);
/// theta'(E) = 1 / sqrt(4 - E^2) on the same branch.
Complex theta_prime(Complex e);

/// Compensated evaluation of S_L. Throws PoleHit within 1e-14 * scale of an eigenvalue.
Complex s_l(const SpectralData& sd, Complex e);
/// Im S_L(E) computed as Im(E) * sum_k a_k / |lambda_k - E|^2.
double im_s_l_direct(const SpectralData& sd, Complex e);
/// Double-double evaluation of S_L, used as an accuracy reference.
Complex s_l_reference(const SpectralData& sd, Complex e);

struct FValue {
    Complex f;
    Complex fprime;
};

Complex f_value(const SpectralData& sd, Complex e);
FValue f_and_fprime(const SpectralData& sd, Complex e);

/// f and f' at E = lambda_anchor + offset. The pole term of the anchor is
/// evaluated from the offset directly, so values stay accurate when the
/// offset is far below the resolution of E itself.
FValue f_and_fprime_anchored(const SpectralData& sd, std::size_t anchor, Complex offset);

struct AlphaSeed {
    Complex alpha;
    Complex seed;
    Complex seed_offset;  // a_g / alpha, i.e. seed - lambda_g without rounding
};

/// alpha = sum_{k != g} a_k / (lambda_k - lambda_g) + exp(-i theta(lambda_g)),
/// seed = lambda_g + a_g / alpha, for the eigenvalue with global index g.
AlphaSeed alpha_and_seed(const SpectralData& sd, std::size_t global);

struct NewtonOptions {
    int max_iter = 50;
    double tol = 1e-11;
};

struct NewtonResult {
    std::size_t anchor = 0;
    Complex offset;
    Complex z;
    double residual = 0.0;
    int iters = 0;
};

class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& what, Complex last, double residual)
        : Error(ErrorKind::NoConvergence, what), last_(last), residual_(residual) {}
    Complex last_iterate() const noexcept { return last_; }
    double residual() const noexcept { return residual_; }

private:
    Complex last_;
    double residual_;
};

/// Damped Newton on f in the offset from the eigenvalue nearest to the seed.
/// Steps are halved up to 8 times until |f| decreases and iterates are kept
/// in the lower half-plane.
NewtonResult newton_refine(const SpectralData& sd, Complex seed, const NewtonOptions& opts = {});
/// Same, starting from lambda_anchor + offset.
NewtonResult newton_refine_anchored(const SpectralData& sd, std::size_t anchor, Complex offset,
                                    const NewtonOptions& opts = {});

enum class BoxConvention { EdgeReflected, EpsShifted, Explicit };
std::string_view to_string(BoxConvention c);

/// [x_lo, x_hi] - i [0, depth].
struct ResonanceBox {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double depth = 0.0;
    int n = 0;
    BoxConvention convention = BoxConvention::Explicit;

    bool contains(Complex z) const {
        return z.real() >= x_lo && z.real() <= x_hi && z.imag() <= 0.0 && z.imag() >= -depth;
    }
};

/// Winding number of f on rect. Rejects rectangles whose boundary meets the
/// real axis outside (-2, 2), lies on it, or passes within 1e-10 * scale of an eigenvalue.
int winding_count(const SpectralData& sd, const Rect& rect, const WindingOptions& opts = {});

/// Number of zeros of f in the closed box: the top side is lifted to +delta
/// (f has no zeros above the axis) and the eigenvalues strictly inside
/// (x_lo, x_hi) are added back as poles. delta <= 0 selects 0.1 times the
/// smallest distance from such an eigenvalue to a vertical side.
int count_in_box(const SpectralData& sd, const ResonanceBox& box, double delta = 0.0,
                 const WindingOptions& opts = {});

struct Resonance {
    int band = 0;
    int n = 0;
    std::size_t global = 0;
    double lambda_n = 0.0;
    double a_n = 0.0;
    Complex alpha_n;
    Complex seed;
    Complex seed_offset;  // seed - lambda_n
    Complex z;
    Complex offset;  // z - lambda_n, resolved below the spacing of doubles near lambda_n
    double residual = 0.0;
    ResonanceBox box;
    ResonanceBox shallow_box;
    int box_count = 0;
    bool winding_verified = false;
    bool in_shallow_box = false;
    int newton_iters = 0;

    bool verified() const { return winding_verified && in_shallow_box && z.imag() < 0.0; }
};

struct SweepOptions {
    double eps = 0.2;
    double C0 = 50.0;
    double C1 = 10.0;
    NewtonOptions newton{};
    WindingOptions winding{};
    /// Throw UniquenessFailed when a box does not hold exactly one zero;
    /// otherwise the record is returned with winding_verified = false.
    bool fail_on_count_mismatch = true;
};

/// Resonance attached to the edge-local eigenvalue n (n = 0 nearest to the edge).
Resonance resonance_at(const SpectralData& sd, const EdgeData& edge, int n, const SweepOptions& opts = {});

/// resonance_at for n = 0 .. floor(eps L / C1). Requires a generic edge.
std::vector<Resonance> sweep_band_edge(const SpectralData& sd, const EdgeData& edge,
                                       const SweepOptions& opts = {});

/// The box around the edge-local eigenvalue n with depth eps^5.
ResonanceBox resonance_box(const SpectralData& sd, const EdgeData& edge, int n, double eps,
                           BoxConvention convention = BoxConvention::EdgeReflected);

struct FreeRegionReport {
    ResonanceBox box;
    int count = 0;
    bool free = false;
    /// Zeros in the n = 0 box with its outer side at the far end of the region;
    /// 1 when the region does not leak into the band.
    int shifted_box_count = 0;
};

/// Counts zeros in [E0 - eps, E0] - i[0, eps^5] for a left edge (mirrored for
/// a right edge). Requires a spectral gap of width >= eps on the outer side
/// and no eigenvalue in the interval (EigenvalueInInterval otherwise).
FreeRegionReport free_region_report(const SpectralData& sd, const BandStructure& bs, const EdgeData& edge,
                                    double eps, const WindingOptions& opts = {});
bool free_region_check(const SpectralData& sd, const BandStructure& bs, const EdgeData& edge, double eps);

struct ImSGrid {
    double max_abs_im_s = 0.0;
    double min_abs_im_exp = 0.0;  // min |Im exp(-i theta)| on the same grid
    double depth_lo = 0.0;        // C0 (n+1) / L^2
    double depth_hi = 0.0;        // eps^5
};

/// Grid maximum of |Im S_L| over the n-th box between depths C0 (n+1)/L^2 and
/// eps^5. Throws EmptyRegion when the lower depth is not below eps^5.
ImSGrid im_s_grid(const SpectralData& sd, const EdgeData& edge, int n, double eps, double C0, int grid);

}  // namespace edgewatch
